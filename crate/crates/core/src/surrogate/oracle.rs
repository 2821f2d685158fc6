use std::collections::HashMap;
use std::io::{Read, Write};
use std::process::{Command, Stdio};

use super::NeighborhoodSet;
use crate::data::{Dataset, Instance};

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("oracle protocol error: {0}")]
    Protocol(String),
    #[error("oracle exited with {status}: {stderr}")]
    Exit { status: String, stderr: String },
    #[error("could not run oracle: {0}")]
    Spawn(#[from] std::io::Error),
    #[error("no precomputed label for instance {0}")]
    Unknown(String),
}

/// The black-box classifier being explained.
pub trait Oracle {
    /// One label per instance, in order.
    fn classify(&mut self, batch: &[Instance]) -> Result<Vec<bool>, OracleError>;

    fn batch_size(&self) -> usize {
        usize::MAX
    }
}

/// Labels looked up from a dataset's label column.
#[derive(Debug, Clone, Default)]
pub struct Precomputed {
    labels: HashMap<Vec<bool>, bool>,
}

impl Precomputed {
    /// The first label seen for a vector wins.
    pub fn from_dataset(d: &Dataset) -> Precomputed {
        let mut labels = HashMap::new();
        for r in &d.rows {
            if let Some(l) = r.label {
                labels.entry(r.values.clone()).or_insert(l);
            }
        }
        Precomputed { labels }
    }

    pub fn insert(&mut self, x: Vec<bool>, label: bool) {
        self.labels.insert(x, label);
    }
}

impl Oracle for Precomputed {
    fn classify(&mut self, batch: &[Instance]) -> Result<Vec<bool>, OracleError> {
        batch
            .iter()
            .map(|x| {
                self.labels
                    .get(&x.values)
                    .copied()
                    .ok_or_else(|| OracleError::Unknown(x.to_csv_line()))
            })
            .collect()
    }
}

/// Runs `sh -c command` once per batch. The child reads one instance per
/// line (`0,1,1,...`) and must print one `0` or `1` line per instance.
#[derive(Debug, Clone)]
pub struct Subprocess {
    pub command: String,
    pub batch_size: usize,
}

impl Subprocess {
    pub fn new(command: impl Into<String>) -> Subprocess {
        Subprocess {
            command: command.into(),
            batch_size: 1024,
        }
    }
}

impl Oracle for Subprocess {
    fn batch_size(&self) -> usize {
        self.batch_size.max(1)
    }

    fn classify(&mut self, batch: &[Instance]) -> Result<Vec<bool>, OracleError> {
        let mut input = String::new();
        for x in batch {
            input.push_str(&x.to_csv_line());
            input.push('\n');
        }
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let mut stdout = child.stdout.take().expect("piped stdout");
        let mut stderr = child.stderr.take().expect("piped stderr");
        let (out, err) = std::thread::scope(|s| {
            s.spawn(move || {
                // A child that exits without reading yields a broken pipe;
                // the exit status and line count checks report it instead.
                let _ = stdin.write_all(input.as_bytes());
            });
            let e = s.spawn(move || {
                let mut buf = String::new();
                let _ = stderr.read_to_string(&mut buf);
                buf
            });
            let mut buf = String::new();
            let r = stdout.read_to_string(&mut buf);
            (r.map(|_| buf), e.join().unwrap_or_default())
        });
        let status = child.wait()?;
        if !status.success() {
            return Err(OracleError::Exit {
                status: status.to_string(),
                stderr: err.trim().to_string(),
            });
        }
        let out = out?;
        let labels = out
            .lines()
            .enumerate()
            .map(|(i, line)| match line.trim() {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(OracleError::Protocol(format!(
                    "line {}: expected 0 or 1, got `{other}`",
                    i + 1
                ))),
            })
            .collect::<Result<Vec<bool>, _>>()?;
        if labels.len() != batch.len() {
            return Err(OracleError::Protocol(format!(
                "expected {} labels, got {}",
                batch.len(),
                labels.len()
            )));
        }
        Ok(labels)
    }
}

/// A closure used as the black box.
pub struct FnOracle<F>(pub F);

impl<F: FnMut(&[bool]) -> bool> Oracle for FnOracle<F> {
    fn classify(&mut self, batch: &[Instance]) -> Result<Vec<bool>, OracleError> {
        Ok(batch.iter().map(|x| (self.0)(&x.values)).collect())
    }
}

/// Labels every member of `ns` through `oracle`, in batches.
pub fn label(
    ns: &NeighborhoodSet,
    oracle: &mut dyn Oracle,
) -> Result<NeighborhoodSet, OracleError> {
    let mut members = ns.members.clone();
    let size = oracle.batch_size().max(1);
    for chunk in members.chunks_mut(size) {
        let labels = oracle.classify(chunk)?;
        if labels.len() != chunk.len() {
            return Err(OracleError::Protocol(format!(
                "expected {} labels, got {}",
                chunk.len(),
                labels.len()
            )));
        }
        for (m, l) in chunk.iter_mut().zip(labels) {
            m.label = Some(l);
        }
    }
    let mut center = ns.center.clone();
    center.label = members.first().and_then(|m| m.label);
    Ok(NeighborhoodSet {
        center,
        radius: ns.radius,
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ns(rows: &[&[u8]]) -> NeighborhoodSet {
        let members: Vec<Instance> = rows
            .iter()
            .map(|r| Instance::new(r.iter().map(|&b| b == 1).collect()))
            .collect();
        NeighborhoodSet {
            center: members[0].clone(),
            radius: 2,
            members,
        }
    }

    #[test]
    fn precomputed_copies_labels() {
        let d = Dataset::new(
            vec!["a".into(), "b".into()],
            vec![
                Instance::labeled(vec![false, false], true),
                Instance::labeled(vec![true, false], false),
            ],
        )
        .unwrap();
        let mut o = Precomputed::from_dataset(&d);
        let l = label(&ns(&[&[0, 0], &[1, 0]]), &mut o).unwrap();
        assert_eq!(l.members[0].label, Some(true));
        assert_eq!(l.members[1].label, Some(false));
        assert_eq!(l.center.label, Some(true));
        assert!(matches!(
            label(&ns(&[&[1, 1]]), &mut o),
            Err(OracleError::Unknown(_))
        ));
    }

    #[test]
    fn constant_subprocess() {
        let mut o = Subprocess::new("while read l; do echo 0; done");
        o.batch_size = 2;
        let l = label(&ns(&[&[0, 1], &[1, 1], &[1, 0]]), &mut o).unwrap();
        assert!(l.members.iter().all(|m| m.label == Some(false)));
    }

    #[test]
    fn subprocess_sees_instances() {
        // Label = first feature.
        let mut o = Subprocess::new("cut -c1");
        let l = label(&ns(&[&[0, 1], &[1, 1]]), &mut o).unwrap();
        assert_eq!(l.members[1].label, Some(true));
        assert_eq!(l.members[0].label, Some(false));
    }

    #[test]
    fn short_output_is_protocol_error() {
        let mut o = Subprocess::new("head -n 1 >/dev/null; echo 1");
        let r = label(&ns(&[&[0, 1], &[1, 1]]), &mut o);
        assert!(matches!(r, Err(OracleError::Protocol(_))));
    }

    #[test]
    fn garbage_is_protocol_error() {
        let mut o = Subprocess::new("cat >/dev/null; echo yes");
        assert!(matches!(
            label(&ns(&[&[0]]), &mut o),
            Err(OracleError::Protocol(_))
        ));
    }

    #[test]
    fn nonzero_exit_is_reported() {
        let mut o = Subprocess::new("cat >/dev/null; echo boom >&2; exit 3");
        match label(&ns(&[&[0]]), &mut o) {
            Err(OracleError::Exit { stderr, .. }) => assert_eq!(stderr, "boom"),
            r => panic!("unexpected {r:?}"),
        }
    }

    #[test]
    fn closure_oracle() {
        let mut o = FnOracle(|x: &[bool]| x.iter().all(|&b| b));
        let l = label(&ns(&[&[1, 1], &[1, 0]]), &mut o).unwrap();
        assert_eq!(l.members[0].label, Some(true));
        assert_eq!(l.members[1].label, Some(false));
    }
}
