//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or runs over its time budget.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use motoguard::config::ControllerConfig;
use motoguard::detectors::{breath_check, crash_step, haversine_m, mag_step, overspeed_step, BreathResult, CrashState, MagState};
use motoguard::gsm::{Fault, FaultTarget, FakeModem, MessageRef, ModemError, ModemPhase, SmsModem};
use motoguard::harness::{load_scenario, run, ConfusionMatrix, Scenario};
use motoguard::nmea::{parse_rmc, parse_rmc_bytes, ParseError};
use motoguard::{Action, AlertKind, GasReading, GeoPoint, GpsFix, SensorEvent, SensorPayload, Timestamp};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($fmt)+)),
        }
    };
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn corpus_dir() -> PathBuf {
    manifest_dir().join("scenarios")
}

fn corpus() -> Vec<Scenario> {
    let mut paths: Vec<PathBuf> = fs::read_dir(corpus_dir())
        .expect("scenario corpus")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    paths.sort();
    paths.iter().map(|p| load_scenario(p).expect("corpus scenario loads")).collect()
}

// ---------------------------------------------------------------------------
// 1. Accuracy / Error formulas

fn formulas() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    for i in 0..200 {
        let cm = ConfusionMatrix::new(
            rng.random_range(0..1000),
            rng.random_range(0..1000),
            rng.random_range(0..1000),
            rng.random_range(0..1000),
        );
        let cm = if cm.total() == 0 { ConfusionMatrix::new(1, 0, 0, 0) } else { cm };
        let (tp, tn, fp, fn_) = (cm.tp as f64, cm.tn as f64, cm.fp as f64, cm.fn_ as f64);
        let want_acc = (tp + tn) / (tp + tn + fn_ + fp) * 100.0;
        let want_err = (fp + fn_) / (tp + tn + fn_ + fp) * 100.0;
        let acc = cm.accuracy().map_err(|e| e.to_string())?;
        let err = cm.error().map_err(|e| e.to_string())?;
        let tol = 4.0 * f64::EPSILON * 100.0;
        ensure!((acc - want_acc).abs() <= tol, "matrix {i} {cm:?}: accuracy {acc} vs {want_acc}");
        ensure!((err - want_err).abs() <= tol, "matrix {i} {cm:?}: error {err} vs {want_err}");
        ensure!(acc + err == 100.0, "matrix {i} {cm:?}: accuracy + error = {}", acc + err);
    }
    ensure!(ConfusionMatrix::default().accuracy().is_err(), "empty matrix must be undefined");
    Ok("200 matrices".into())
}

// ---------------------------------------------------------------------------
// 2. Hourly beacon count

fn fix(t: u64) -> SensorEvent {
    SensorEvent::new(
        Timestamp(t),
        SensorPayload::GpsFix(GpsFix::new(GeoPoint::new(14.5995, 120.9842).unwrap(), 0.0, true).unwrap()),
    )
    .unwrap()
}

fn beacon_count() -> Outcome {
    let cfg = ControllerConfig::default();
    let period = cfg.beacon_period_ms;
    let mut rng = StdRng::seed_from_u64(2);
    let mut spans: Vec<u64> = vec![0, period - 1, period, 10 * period];
    while spans.len() < 50 {
        spans.push(rng.random_range(0..=10 * period));
    }
    for span in spans {
        let mut events: Vec<SensorEvent> = (0..=span / 60_000).map(|k| fix(k * 60_000)).collect();
        if span % 60_000 != 0 {
            events.push(fix(span));
        }
        let sc = Scenario {
            name: format!("beacon_{span}"),
            objective: None,
            config: BTreeMap::new(),
            events,
            expected: Vec::new(),
        };
        let log = run(&sc, &cfg).map_err(|e| e.to_string())?;
        let sms = log
            .commands()
            .filter(|c| matches!(&c.action, Action::SmsSend { to, body } if to == &cfg.owner_number && body.starts_with("LOCATION")))
            .count() as u64;
        let alerts = log.alerts().filter(|a| a.kind == AlertKind::Beacon).count() as u64;
        ensure!(
            sms == span / period && alerts == span / period,
            "span {span} ms: {sms} beacon SMS, {alerts} alerts, want {}",
            span / period
        );
    }
    Ok("50 spans over 0-10 h".into())
}

// ---------------------------------------------------------------------------
// 3. Determinism and corpus coverage

fn determinism() -> Outcome {
    let scenarios = corpus();
    ensure!(scenarios.len() >= 16, "corpus has {} scenarios", scenarios.len());
    let detectors: [(&str, &[AlertKind]); 8] = [
        ("collision", &[AlertKind::Collision]),
        ("proximity", &[AlertKind::VehicleProximity]),
        ("hazard", &[AlertKind::RoadHazard]),
        ("alcohol/gas", &[AlertKind::AlcoholLockout, AlertKind::GasLeak]),
        ("overspeed", &[AlertKind::Overspeed]),
        ("crash", &[AlertKind::Crash]),
        ("overtake", &[AlertKind::OvertakeUnsafe]),
        ("theft", &[AlertKind::Theft, AlertKind::Beacon]),
    ];
    for (name, kinds) in detectors {
        let n = scenarios
            .iter()
            .filter(|s| s.expected.iter().any(|l| kinds.contains(&l.kind)))
            .count();
        ensure!(n >= 2, "only {n} scenarios exercise {name}");
    }
    let cfg = ControllerConfig::default();
    for sc in &scenarios {
        let a = run(sc, &cfg).map_err(|e| format!("{}: {e}", sc.name))?.to_jsonl();
        let b = run(sc, &cfg).map_err(|e| format!("{}: {e}", sc.name))?.to_jsonl();
        ensure!(a == b, "{}: logs differ between runs", sc.name);
    }
    Ok(format!("{} scenarios", scenarios.len()))
}

// ---------------------------------------------------------------------------
// 4. NMEA conformance

fn xor_checksum(body: &str) -> String {
    format!("{:02X}", body.bytes().fold(0u8, |a, b| a ^ b))
}

fn nmea() -> Outcome {
    let text = fs::read_to_string(manifest_dir().join("tests/fixtures/nmea_corpus.tsv")).map_err(|e| e.to_string())?;
    let mut sentences = 0;
    let mut mutations = 0;
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let cols: Vec<&str> = line.split('\t').collect();
        let [expect, lat, lon, sentence] = cols[..] else {
            return Err(format!("bad corpus row `{line}`"));
        };
        sentences += 1;
        let parsed = parse_rmc(sentence);
        match expect {
            "ok" => {
                let rmc = parsed.map_err(|e| format!("{sentence}: {e}"))?;
                let (lat, lon): (f64, f64) = (lat.parse().unwrap(), lon.parse().unwrap());
                ensure!(
                    (rmc.point.lat_deg - lat).abs() < 1e-7 && (rmc.point.lon_deg - lon).abs() < 1e-7,
                    "{sentence}: decoded {} want {lat},{lon}",
                    rmc.point
                );
                let (body, sum) = sentence[1..].split_once('*').unwrap();
                ensure!(sum == xor_checksum(body), "{sentence}: corpus checksum disagrees with oracle");
                // every other value of either checksum character must be rejected
                for pos in 0..2 {
                    for c in (b' '..=b'~').map(char::from) {
                        let mut mutated: Vec<char> = sum.chars().collect();
                        if mutated[pos] == c {
                            continue;
                        }
                        mutated[pos] = c;
                        let m: String = format!("${body}*{}", mutated.iter().collect::<String>());
                        mutations += 1;
                        ensure!(parse_rmc(&m).is_err(), "mutation accepted: {m}");
                    }
                }
            }
            "ChecksumMismatch" => ensure!(
                matches!(parsed, Err(ParseError::ChecksumMismatch { .. })),
                "{sentence}: got {parsed:?}"
            ),
            "UnsupportedSentence" => ensure!(
                matches!(parsed, Err(ParseError::UnsupportedSentence(_))),
                "{sentence}: got {parsed:?}"
            ),
            _ => ensure!(parsed.is_err(), "{sentence}: accepted"),
        }
    }
    ensure!(sentences == 100, "corpus has {sentences} sentences");

    let mut rng = StdRng::seed_from_u64(4);
    for i in 0..10_000 {
        let len = rng.random_range(0..100);
        let mut bytes: Vec<u8> = if i % 2 == 0 { b"$GPRMC,".to_vec() } else { Vec::new() };
        bytes.extend((0..len).map(|_| rng.random::<u8>()));
        let r = panic::catch_unwind(|| parse_rmc_bytes(&bytes));
        ensure!(r.is_ok(), "parser panicked on {bytes:?}");
    }
    Ok(format!("{sentences} sentences, {mutations} checksum mutations, 10000 fuzz lines"))
}

// ---------------------------------------------------------------------------
// 5. Modem protocol

fn variant(e: &ModemError) -> &'static str {
    match e {
        ModemError::Timeout { .. } => "Timeout",
        ModemError::ErrorResponse { .. } => "ErrorResponse",
        ModemError::ChannelClosed => "ChannelClosed",
        ModemError::PromptTimeout => "PromptTimeout",
        ModemError::SendRejected(_) => "SendRejected",
        ModemError::InvalidNumber(_) => "InvalidNumber",
        ModemError::InvalidBody(_) => "InvalidBody",
        ModemError::NotReady(_) => "NotReady",
    }
}

fn ready(fake: FakeModem) -> SmsModem<FakeModem> {
    let mut m = SmsModem::new(fake);
    m.init().expect("init");
    m
}

fn modem() -> Outcome {
    const OWNER: &str = "+639170000001";
    let mut m = ready(FakeModem::compliant());
    let init: Vec<&[u8]> = vec![b"AT\r", b"ATE0\r", b"AT+CMGF=1\r"];
    ensure!(m.channel().transcript() == init.as_slice(), "init transcript {:?}", m.channel().transcript());
    let r = m.send_sms(OWNER, "THEFT ALERT").map_err(|e| e.to_string())?;
    ensure!(r == MessageRef(1), "reference {r:?}");
    let send: Vec<&[u8]> = vec![b"AT+CMGS=\"+639170000001\"\r", b"THEFT ALERT\x1a"];
    ensure!(m.channel().transcript()[3..] == send[..], "send transcript {:?}", &m.channel().transcript()[3..]);
    ensure!(m.state().phase == ModemPhase::Ready, "phase after send {:?}", m.state().phase);

    let mut seen = Vec::new();
    let mut check = |name: &str, got: Result<(), ModemError>, want: &str, m_phase: ModemPhase| -> Result<(), String> {
        let e = got.err().ok_or_else(|| format!("{name}: succeeded"))?;
        ensure!(variant(&e) == want, "{name}: got {e:?}, want {want}");
        ensure!(m_phase == ModemPhase::Failed || want == "NotReady", "{name}: phase {m_phase:?}");
        seen.push(want.to_string());
        Ok(())
    };

    let mut m = SmsModem::new(FakeModem::silent());
    let r = m.init();
    ensure!(
        r == Err(ModemError::Timeout { command: "AT".into() }),
        "silent init: {r:?}"
    );
    ensure!(m.channel().transcript().len() == 3, "init retries: {:?}", m.channel().transcript());
    check("silent init", r, "Timeout", m.state().phase)?;

    let mut m = SmsModem::new(FakeModem::compliant().with_fault(FaultTarget::Command("AT+CMGF"), Fault::Error));
    let r = m.init();
    ensure!(r == Err(ModemError::ErrorResponse { command: "AT+CMGF=1".into() }), "{r:?}");
    check("CMGF error", r, "ErrorResponse", m.state().phase)?;

    let mut m = SmsModem::new(FakeModem::compliant().with_fault(FaultTarget::Command("ATE0"), Fault::Close));
    let r = m.init();
    check("closed", r, "ChannelClosed", m.state().phase)?;

    let mut m = ready(FakeModem::compliant().with_fault(FaultTarget::Command("AT+CMGS"), Fault::Silent));
    let r = m.send_sms(OWNER, "x").map(|_| ());
    check("no prompt", r, "PromptTimeout", m.state().phase)?;

    let mut m = ready(
        FakeModem::compliant().with_fault(FaultTarget::Body, Fault::Reply(b"\r\n+CMS ERROR: 500\r\n".to_vec())),
    );
    let r = m.send_sms(OWNER, "x").map(|_| ());
    check("rejected", r, "SendRejected", m.state().phase)?;

    let mut m = ready(FakeModem::compliant().with_fault(FaultTarget::Body, Fault::Silent));
    let r = m.send_sms(OWNER, "x").map(|_| ());
    ensure!(r == Err(ModemError::Timeout { command: "AT+CMGS".into() }), "body timeout: {r:?}");
    check("body timeout", r, "Timeout", m.state().phase)?;

    let mut m = ready(FakeModem::compliant());
    let r = m.send_sms("12ab", "x").map(|_| ());
    ensure!(m.channel().transcript().len() == 3, "invalid number reached the wire");
    check("bad number", r, "InvalidNumber", m.state().phase)?;

    let mut m = ready(FakeModem::compliant());
    let r = m.send_sms(OWNER, &"x".repeat(161)).map(|_| ());
    check("long body", r, "InvalidBody", m.state().phase)?;

    let mut m = SmsModem::new(FakeModem::compliant());
    let r = m.send_sms(OWNER, "x").map(|_| ());
    ensure!(m.channel().transcript().is_empty(), "uninitialised send reached the wire");
    check("not ready", r, "NotReady", m.state().phase)?;

    seen.sort();
    seen.dedup();
    ensure!(seen.len() == 8, "variants exercised: {seen:?}");
    Ok("golden init/send, 8 error variants".into())
}

// ---------------------------------------------------------------------------
// 6. Detector oracles

fn crash_oracle(trace: &[(u64, f64, f64)], cfg: &ControllerConfig) -> Vec<usize> {
    let gated = |i: usize| trace[i].1 >= cfg.crash_tilt_deg && trace[i].2 <= cfg.crash_speed_max_kph;
    let mut fired = Vec::new();
    for i in 0..trace.len() {
        if !gated(i) {
            continue;
        }
        let mut j = i;
        while j > 0 && gated(j - 1) {
            j -= 1;
        }
        let held = |k: usize| trace[k].0 - trace[j].0 >= cfg.crash_hold_ms;
        if held(i) && !(j..i).any(held) {
            fired.push(i);
        }
    }
    fired
}

fn overspeed_oracle(speeds: &[f64], cfg: &ControllerConfig) -> Vec<usize> {
    let floor = cfg.speed_limit_kph - cfg.speed_hysteresis_kph;
    (0..speeds.len())
        .filter(|&i| {
            speeds[i] > cfg.speed_limit_kph
                && match (0..i).rev().find(|&k| speeds[k] > cfg.speed_limit_kph) {
                    None => true,
                    Some(k) => speeds[k + 1..i].iter().any(|&s| s < floor),
                }
        })
        .collect()
}

fn mag_oracle(readings: &[f64], cfg: &ControllerConfig) -> Vec<usize> {
    let n = cfg.mag_calib_samples as usize;
    if readings.len() <= n {
        return Vec::new();
    }
    let baseline = readings[..n].iter().sum::<f64>() / n as f64;
    let deviant = |i: usize| (readings[i] - baseline).abs() > cfg.mag_deviation_ut;
    let persist = cfg.mag_persist_samples as usize;
    (n..readings.len())
        .filter(|&i| i + 1 >= n + persist && (i + 1 - persist..=i).all(deviant) && (i + 1 - persist == n || !deviant(i - persist)))
        .collect()
}

fn detector_oracles() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let base = ControllerConfig::default();
    let mut fired = [0usize; 4];

    for trace_no in 0..1000 {
        let len = rng.random_range(1..20);
        let mut t = 0u64;
        let trace: Vec<(u64, f64, f64)> = (0..len)
            .map(|_| {
                t += [0, 500, 1000, 1500, 2000][rng.random_range(0..5)];
                let tilt = [30.0, 59.9, 60.0, 75.0, 90.0, 80.0][rng.random_range(0..6)];
                let speed = [0.0, 0.0, 2.0, 5.0, 5.1, 20.0][rng.random_range(0..6)];
                (t, tilt, speed)
            })
            .collect();
        let mut s = CrashState::default();
        let mut got = Vec::new();
        for (i, &(t, tilt, speed)) in trace.iter().enumerate() {
            let (n, trig) = crash_step(&s, tilt, speed, Timestamp(t), &base);
            s = n;
            if trig.is_some() {
                got.push(i);
            }
        }
        let want = crash_oracle(&trace, &base);
        fired[0] += want.len();
        ensure!(got == want, "crash trace {trace_no} {trace:?}: fired {got:?}, oracle {want:?}");
    }

    for trace_no in 0..1000 {
        let len = rng.random_range(1..30);
        let speeds: Vec<f64> = (0..len)
            .map(|_| [60.0, 74.9, 75.0, 78.0, 80.0, 80.1, 85.0][rng.random_range(0..7)])
            .collect();
        let mut active = false;
        let mut got = Vec::new();
        for (i, &v) in speeds.iter().enumerate() {
            let (a, trig) = overspeed_step(active, v, &base);
            active = a;
            if trig.is_some() {
                got.push(i);
            }
        }
        let want = overspeed_oracle(&speeds, &base);
        fired[1] += want.len();
        ensure!(got == want, "overspeed trace {trace_no} {speeds:?}: fired {got:?}, oracle {want:?}");
    }

    for trace_no in 0..1000 {
        let cfg = ControllerConfig {
            mag_calib_samples: [1, 2, 4][rng.random_range(0..3)],
            mag_persist_samples: rng.random_range(1..5),
            ..base.clone()
        };
        let len = rng.random_range(0..30);
        let readings: Vec<f64> = (0..len)
            .map(|i| {
                if i < cfg.mag_calib_samples as usize {
                    [48.0, 50.0, 52.0][rng.random_range(0..3)]
                } else {
                    [50.0, 54.0, 56.5, 60.0, 44.0, 42.5][rng.random_range(0..6)]
                }
            })
            .collect();
        let mut s = MagState::default();
        let mut got = Vec::new();
        for (i, &b) in readings.iter().enumerate() {
            let (n, trig) = mag_step(&s, b, &cfg);
            s = n;
            if trig.is_some() {
                got.push(i);
            }
        }
        let want = mag_oracle(&readings, &cfg);
        fired[2] += want.len();
        ensure!(got == want, "mag trace {trace_no} {readings:?} {cfg:?}: fired {got:?}, oracle {want:?}");
    }

    for trace_no in 0..1000 {
        let len = rng.random_range(1..10);
        let window: Vec<GasReading> = (0..len)
            .map(|_| GasReading::new(f64::from(rng.random_range(10u32..=500)), 5.0, 100.0).unwrap())
            .collect();
        let threshold = if rng.random_bool(0.3) {
            window[rng.random_range(0..window.len())].ethanol_ppm
        } else {
            f64::from(rng.random_range(10u32..=500))
        };
        let cfg = ControllerConfig {
            ethanol_lockout_ppm: threshold,
            ..base.clone()
        };
        let mut sorted: Vec<f64> = window.iter().map(|g| g.ethanol_ppm).collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let want = if sorted[0] >= threshold {
            BreathResult::Fail { peak_ppm: sorted[0] }
        } else {
            BreathResult::Pass
        };
        fired[3] += usize::from(want != BreathResult::Pass);
        let got = breath_check(&window, &cfg).map_err(|e| e.to_string())?;
        ensure!(got == want, "breath trace {trace_no}: {got:?} vs oracle {want:?}");
    }
    ensure!(breath_check(&[], &base).is_err(), "empty breath window accepted");
    ensure!(fired.iter().all(|&n| n > 0), "an oracle never fired: {fired:?}");
    Ok(format!(
        "1000 traces each; triggers crash={} overspeed={} magnetometer={} breath-fail={}",
        fired[0], fired[1], fired[2], fired[3]
    ))
}

// ---------------------------------------------------------------------------
// 7. End-to-end evaluation via the binary

fn cli_eval(dir: &Path) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_motoguard"))
        .arg("eval")
        .arg("--scenario-dir")
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned()))
}

fn end_to_end() -> Outcome {
    let (code, stdout) = cli_eval(&corpus_dir())?;
    ensure!(code == 0, "corpus exit {code}\n{stdout}");
    ensure!(stdout.contains("Successful 100%"), "summary missing\n{stdout}");
    ensure!(stdout.contains("(no incidents)"), "unexpected incidents\n{stdout}");

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    for entry in fs::read_dir(corpus_dir()).map_err(|e| e.to_string())? {
        let p = entry.map_err(|e| e.to_string())?.path();
        fs::copy(&p, tmp.path().join(p.file_name().unwrap())).map_err(|e| e.to_string())?;
    }
    let bad = manifest_dir().join("tests/fixtures/failing/expects_missing_crash.jsonl");
    fs::copy(&bad, tmp.path().join("expects_missing_crash.jsonl")).map_err(|e| e.to_string())?;
    let (code, stdout) = cli_eval(tmp.path())?;
    ensure!(code == 1, "exit {code} with a failing case\n{stdout}");
    let incidents = stdout.split("INCIDENT LOG").nth(1).unwrap_or("");
    let row = incidents
        .lines()
        .find(|l| l.starts_with("| 1 "))
        .ok_or_else(|| format!("no incident row\n{stdout}"))?;
    ensure!(
        row.contains("expected Crash alert") && row.contains("Severity 1") && row.contains("High"),
        "incident row `{row}`"
    );
    let case_ref = row.split('|').map(str::trim).nth(3).unwrap_or("");
    let case_row = stdout
        .lines()
        .find(|l| l.starts_with(&format!("| {case_ref} ")))
        .ok_or_else(|| format!("incident refers to unknown case `{case_ref}`"))?;
    ensure!(case_row.contains("Fail"), "referenced case row `{case_row}`");
    Ok("corpus exit 0 with Successful 100%; failing case exit 1 with incident row".into())
}

// ---------------------------------------------------------------------------
// 8. Great-circle distance

/// Distances on a 6,371,000 m sphere from the atan2 (Vincenty special case)
/// formula, computed independently and frozen.
const PAIRS: [(f64, f64, f64, f64, f64); 20] = [
    (14.5995, 120.9842, 14.5995, 120.98438586554636, 19.999987),
    (14.5995, 120.9842, 14.59995, 120.9842, 50.037717),
    (14.5995, 120.9842, 14.676, 121.0437, 10645.958307),
    (14.5995, 120.9842, 10.3157, 123.8854, 571025.344178),
    (0.0, 0.0, 0.0, 1.0, 111194.926645),
    (0.0, 0.0, 1.0, 0.0, 111194.926645),
    (51.5007, -0.1246, 40.6892, -74.0445, 5574840.456849),
    (-33.8568, 151.2153, -37.8136, 144.9631, 714706.621657),
    (89.9, 0.0, 89.9, 180.0, 22238.985329),
    (0.0, 179.9, 0.0, -179.9, 22238.985329),
    (35.6762, 139.6503, 37.5665, 126.978, 1149357.335840),
    (48.8584, 2.2945, 48.8606, 2.3376, 3162.499285),
    (-22.9519, -43.2105, -34.6037, -58.3816, 1961508.633557),
    (64.1466, -21.9426, 60.1699, 24.9384, 2416204.052189),
    (1.3521, 103.8198, 13.7563, 100.5018, 1426758.957920),
    (14.5995, 120.9842, 14.5996, 120.9843, 15.473544),
    (-0.5, -0.5, 0.5, 0.5, 157252.375354),
    (45.0, 45.0, -45.0, -135.0001, 20015078.933352),
    (30.0, -90.0, 30.0001, -90.0001, 14.709703),
    (7.0731, 125.6128, 16.4023, 120.596, 1172037.708988),
];

fn geofence() -> Outcome {
    let mut worst: f64 = 0.0;
    for (lat1, lon1, lat2, lon2, want) in PAIRS {
        let got = haversine_m(GeoPoint::new(lat1, lon1).unwrap(), GeoPoint::new(lat2, lon2).unwrap());
        let rel = (got - want).abs() / want;
        worst = worst.max(rel);
        ensure!(rel <= 1e-4, "({lat1},{lon1})-({lat2},{lon2}): {got} m vs {want} m");
    }
    Ok(format!("20 pairs, worst relative error {worst:.1e}"))
}

// ---------------------------------------------------------------------------

fn main() {
    let criteria: [Criterion; 8] = [
        ("accuracy/error formulas", formulas, Duration::from_secs(1)),
        ("hourly beacon count", beacon_count, Duration::from_secs(1)),
        ("deterministic replay of corpus", determinism, Duration::from_secs(10)),
        ("NMEA conformance", nmea, Duration::from_secs(5)),
        ("modem protocol", modem, Duration::from_secs(1)),
        ("detector oracles", detector_oracles, Duration::from_secs(10)),
        ("end-to-end evaluation report", end_to_end, Duration::from_secs(10)),
        ("geofence distance", geofence, Duration::from_secs(1)),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>().map(String::as_str).or(p.downcast_ref::<&str>().copied()))));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > budget => Err(format!("{detail}; took {took:?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} ({} ms)", i + 1, took.as_millis()),
            Err(why) => {
                failures += 1;
                println!("FAIL {} {name}: {why} ({} ms)", i + 1, took.as_millis());
            }
        }
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
