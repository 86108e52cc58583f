use crate::{Error, Millis, Result};

/// Parses `MM:SS.s` or `HH:MM:SS.s` into milliseconds.
///
/// Up to three fractional digits are accepted and kept exactly.
pub fn parse_timestamp(text: &str) -> Result<Millis> {
    let err = |reason| Error::Timestamp {
        text: text.to_string(),
        reason,
    };
    let s = text.trim();
    let parts: Vec<&str> = s.split(':').collect();
    let (hours, minutes, seconds) = match parts.as_slice() {
        [m, sec] => ("0", *m, *sec),
        [h, m, sec] => (*h, *m, *sec),
        _ => return Err(err("expected MM:SS.s or HH:MM:SS.s")),
    };
    let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    if !digits(hours) || !digits(minutes) {
        return Err(err("hour and minute fields must be digits"));
    }
    let (whole, frac) = match seconds.split_once('.') {
        Some((w, f)) => (w, f),
        None => (seconds, ""),
    };
    if !digits(whole) || whole.len() > 2 {
        return Err(err("seconds field must be one or two digits"));
    }
    if frac.len() > 3 || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("at most three fractional digits"));
    }
    if seconds.ends_with('.') {
        return Err(err("empty fraction"));
    }
    let h: u64 = hours.parse().map_err(|_| err("hour out of range"))?;
    let m: u64 = minutes.parse().map_err(|_| err("minute out of range"))?;
    let sec: u64 = whole.parse().map_err(|_| err("second out of range"))?;
    if sec >= 60 {
        return Err(err("seconds must be below 60"));
    }
    if parts.len() == 3 && m >= 60 {
        return Err(err("minutes must be below 60"));
    }
    let frac_ms = match frac.len() {
        0 => 0,
        n => frac.parse::<u64>().unwrap() * 10u64.pow(3 - n as u32),
    };
    h.checked_mul(3_600_000)
        .and_then(|v| v.checked_add(m.checked_mul(60_000)?))
        .and_then(|v| v.checked_add(sec * 1000 + frac_ms))
        .ok_or_else(|| err("value overflows"))
}

/// Canonical text form: `MM:SS.s` below one hour, `HH:MM:SS.s` above.
/// Three fractional digits are written when the value is not a multiple of
/// 100 ms.
pub fn format_timestamp(ms: Millis) -> String {
    let h = ms / 3_600_000;
    let m = (ms / 60_000) % 60;
    let s = (ms / 1000) % 60;
    let frac = ms % 1000;
    let frac = if frac.is_multiple_of(100) {
        format!("{}", frac / 100)
    } else {
        format!("{frac:03}")
    };
    if h == 0 {
        format!("{m:02}:{s:02}.{frac}")
    } else {
        format!("{h:02}:{m:02}:{s:02}.{frac}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn table_one_forms() {
        assert_eq!(parse_timestamp("00:36.5").unwrap(), 36_500);
        assert_eq!(parse_timestamp("00:00.0").unwrap(), 0);
        assert_eq!(parse_timestamp("01:02:03.4").unwrap(), 3_723_400);
        assert_eq!(parse_timestamp("00:41.55").unwrap(), 41_550);
        assert_eq!(parse_timestamp("12:07").unwrap(), 727_000);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "36.5", "00:61.0", "1:2:3:4", "aa:10.0", "00:10.", "00:10.1234", "01:60:00.0"] {
            assert!(parse_timestamp(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn canonical_format() {
        assert_eq!(format_timestamp(36_500), "00:36.5");
        assert_eq!(format_timestamp(3_723_400), "01:02:03.4");
        assert_eq!(format_timestamp(41_550), "00:41.550");
    }

    proptest! {
        #[test]
        fn parse_inverts_format(tenths in 0u64..864_000) {
            let t = tenths * 100;
            prop_assert_eq!(parse_timestamp(&format_timestamp(t)).unwrap(), t);
        }
    }
}
