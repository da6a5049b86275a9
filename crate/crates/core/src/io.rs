//! JSON files for circuits and compiled artifacts.
//!
//! Raw circuits are `{"num_qubits", "instructions": [{"name", "qubits",
//! "params", "condition"}]}`. Scheduled circuits add per-instruction
//! `t_start`/`duration` and group instructions into `layers`. Floats with no
//! fractional part are written as integers so files stay byte-stable and
//! readable.

use crate::circuit::{Circuit, Gate, Instruction, Layer, LayerKind, LayerRole, ScheduledCircuit};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize, Serializer};

pub const SCHEMA_VERSION: &str = "1";

/// Float that serializes as an integer when it is one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let x = self.0;
        if x.fract() == 0.0 && x.abs() < 9.007_199_254_740_992e15 {
            // -0.0 prints as 0
            s.serialize_i64(x as i64)
        } else {
            s.serialize_f64(x)
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Num)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionJson {
    pub bit: usize,
    pub value: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstructionJson {
    pub name: String,
    pub qubits: Vec<usize>,
    #[serde(default)]
    pub params: Vec<Num>,
    #[serde(default)]
    pub condition: Option<ConditionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_start: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<Num>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerKindJson {
    OneQubit,
    TwoQubit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerRoleJson {
    #[default]
    Normal,
    Correction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerJson {
    pub kind: LayerKindJson,
    #[serde(default)]
    pub role: LayerRoleJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_start: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<Num>,
    pub instructions: Vec<InstructionJson>,
}

/// On-disk circuit; `layers` is present for layered circuits and then takes
/// precedence over `instructions`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitJson {
    #[serde(default = "schema")]
    pub schema_version: String,
    pub num_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub makespan: Option<Num>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub instructions: Vec<InstructionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<LayerJson>>,
}

fn schema() -> String {
    SCHEMA_VERSION.to_string()
}

fn inst_to_json(i: &Instruction, timed: bool) -> InstructionJson {
    let (gate, condition) = match &i.gate {
        Gate::Conditional { gate, clbit, value } => (gate.as_ref(), Some(ConditionJson { bit: *clbit, value: *value })),
        g => (g, None),
    };
    InstructionJson {
        name: gate.name().to_string(),
        qubits: i.qubits.clone(),
        params: gate.params().into_iter().map(Num).collect(),
        condition,
        t_start: if timed { Some(Num(i.start())) } else { None },
        duration: if timed { Some(Num(i.duration)) } else { None },
    }
}

fn inst_from_json(j: &InstructionJson) -> Result<Instruction> {
    let params: Vec<f64> = j.params.iter().map(|n| n.0).collect();
    let mut gate = Gate::from_parts(&j.name, &params)?;
    if let Some(c) = j.condition {
        if c.value > 1 {
            return Err(Error::InvalidCircuit(format!("condition value {} is not a bit", c.value)));
        }
        gate = Gate::Conditional { gate: Box::new(gate), clbit: c.bit, value: c.value };
    }
    let mut inst = Instruction::new(gate, &j.qubits);
    if let Some(d) = j.duration {
        if !(d.0 >= 0.0) {
            return Err(Error::InvalidCircuit("negative duration".into()));
        }
        inst.duration = d.0;
    }
    inst.t_start = j.t_start.map(|t| t.0);
    Ok(inst)
}

impl From<&Circuit> for CircuitJson {
    fn from(c: &Circuit) -> Self {
        CircuitJson {
            schema_version: schema(),
            num_qubits: c.num_qubits,
            makespan: None,
            instructions: c.instructions.iter().map(|i| inst_to_json(i, false)).collect(),
            layers: None,
        }
    }
}

impl From<&ScheduledCircuit> for CircuitJson {
    fn from(c: &ScheduledCircuit) -> Self {
        let timed = c.scheduled;
        let layers = c
            .layers
            .iter()
            .map(|l| LayerJson {
                kind: match l.kind {
                    LayerKind::OneQubit => LayerKindJson::OneQubit,
                    LayerKind::TwoQubit => LayerKindJson::TwoQubit,
                },
                role: match l.role {
                    LayerRole::Normal => LayerRoleJson::Normal,
                    LayerRole::Correction => LayerRoleJson::Correction,
                },
                t_start: timed.then_some(Num(l.t_start)),
                duration: timed.then_some(Num(l.duration)),
                instructions: l.instructions.iter().map(|i| inst_to_json(i, timed)).collect(),
            })
            .collect();
        CircuitJson {
            schema_version: schema(),
            num_qubits: c.num_qubits,
            makespan: timed.then_some(Num(c.makespan())),
            instructions: Vec::new(),
            layers: Some(layers),
        }
    }
}

impl CircuitJson {
    fn check_version(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!("unsupported schema_version '{}'", self.schema_version)));
        }
        Ok(())
    }

    /// Flat instruction list; layered files are flattened in layer order.
    pub fn to_circuit(&self) -> Result<Circuit> {
        self.check_version()?;
        if self.layers.is_some() {
            return Ok(self.to_scheduled()?.to_circuit());
        }
        let c = Circuit {
            num_qubits: self.num_qubits,
            instructions: self.instructions.iter().map(inst_from_json).collect::<Result<_>>()?,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn to_scheduled(&self) -> Result<ScheduledCircuit> {
        self.check_version()?;
        let layers = self
            .layers
            .as_ref()
            .ok_or_else(|| Error::InvalidCircuit("file has no layers".into()))?;
        let timed = layers.iter().all(|l| l.t_start.is_some() && l.duration.is_some());
        let mut out = ScheduledCircuit::new(self.num_qubits);
        out.scheduled = timed && (self.makespan.is_some() || !layers.is_empty());
        for l in layers {
            let mut layer = Layer::new(match l.kind {
                LayerKindJson::OneQubit => LayerKind::OneQubit,
                LayerKindJson::TwoQubit => LayerKind::TwoQubit,
            });
            layer.role = match l.role {
                LayerRoleJson::Normal => LayerRole::Normal,
                LayerRoleJson::Correction => LayerRole::Correction,
            };
            layer.t_start = l.t_start.map_or(0.0, |n| n.0);
            layer.duration = l.duration.map_or(0.0, |n| n.0);
            layer.instructions = l.instructions.iter().map(inst_from_json).collect::<Result<_>>()?;
            out.layers.push(layer);
        }
        out.check_invariants()?;
        Ok(out)
    }
}

pub fn circuit_to_json(c: &Circuit) -> Result<String> {
    Ok(serde_json::to_string_pretty(&CircuitJson::from(c))?)
}

pub fn scheduled_to_json(c: &ScheduledCircuit) -> Result<String> {
    Ok(serde_json::to_string_pretty(&CircuitJson::from(c))?)
}

pub fn parse_circuit_json(s: &str) -> Result<CircuitJson> {
    Ok(serde_json::from_str(s)?)
}

/// Compiled circuit plus the reports of the passes that ran.
#[derive(Serialize)]
struct CompileArtifact<'a> {
    schema_version: &'static str,
    passes: String,
    seed: u64,
    circuit: CircuitJson,
    twirl_records: &'a [crate::twirl::TwirlRecord],
    #[serde(skip_serializing_if = "Option::is_none")]
    dd: Option<&'a crate::cadd::DdReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    compensation: Option<&'a crate::caec::CompensationReport>,
}

pub fn compile_output_to_json(out: &crate::pipeline::CompileOutput, passes: &crate::pipeline::PassList, seed: u64) -> Result<String> {
    let a = CompileArtifact {
        schema_version: SCHEMA_VERSION,
        passes: passes.to_string(),
        seed,
        circuit: CircuitJson::from(&out.circuit),
        twirl_records: &out.twirl_records,
        dd: out.dd.as_ref(),
        compensation: out.compensation.as_ref(),
    };
    Ok(serde_json::to_string_pretty(&a)?)
}

/// Reads either a bare circuit file or a compile artifact and returns its
/// circuit part.
pub fn read_any_circuit(s: &str) -> Result<CircuitJson> {
    let v: serde_json::Value = serde_json::from_str(s)?;
    match v.get("circuit") {
        Some(inner) => Ok(serde_json::from_value(inner.clone())?),
        None => Ok(serde_json::from_value(v)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::DeviceModel;
    use crate::schedule::schedule;
    use crate::stratify::stratify;

    fn sample() -> Circuit {
        let mut c = Circuit::new(3);
        c.push(Gate::RZ(0.25), &[0]).push(Gate::Ecr, &[0, 1]).push(Gate::Measure { clbit: 0 }, &[0]);
        c.push(Gate::Conditional { gate: Box::new(Gate::X), clbit: 0, value: 1 }, &[2]);
        c.push(Gate::UCan { alpha: 0.1, beta: -0.2, gamma: 0.3 }, &[1, 2]);
        c
    }

    #[test]
    fn raw_round_trip() {
        let c = sample();
        let s = circuit_to_json(&c).unwrap();
        assert!(s.contains("\"condition\": {"));
        assert_eq!(parse_circuit_json(&s).unwrap().to_circuit().unwrap(), c);
    }

    #[test]
    fn scheduled_round_trip_and_integers() {
        let s = schedule(&stratify(&sample()).unwrap(), &DeviceModel::line(3, 5e4)).unwrap();
        let text = scheduled_to_json(&s).unwrap();
        assert!(text.contains("\"duration\": 500"), "{text}");
        assert!(!text.contains("500.0"));
        let back = parse_circuit_json(&text).unwrap().to_scheduled().unwrap();
        assert_eq!(back, s);
        assert_eq!(scheduled_to_json(&back).unwrap(), text);
    }

    #[test]
    fn minimal_file_and_errors() {
        let j = r#"{"num_qubits": 2, "instructions": [{"name": "cx", "qubits": [0, 1]}]}"#;
        let c = parse_circuit_json(j).unwrap().to_circuit().unwrap();
        assert_eq!(c.instructions[0].gate, Gate::Cnot);
        let bad = r#"{"num_qubits": 1, "instructions": [{"name": "cx", "qubits": [0, 1]}]}"#;
        assert!(parse_circuit_json(bad).unwrap().to_circuit().is_err());
        let v = r#"{"schema_version": "9", "num_qubits": 1}"#;
        assert!(matches!(parse_circuit_json(v).unwrap().to_circuit(), Err(Error::Config(_))));
    }

    #[test]
    fn artifact_reads_back() {
        use crate::pipeline::{compile, CompileOptions, PassList};
        let dev = DeviceModel::line(3, 5e4);
        let passes = PassList::parse("stratify,schedule,twirl,caec").unwrap();
        let mut c = Circuit::new(3);
        c.push(Gate::Ecr, &[0, 1]).push(Gate::SX, &[2]).push(Gate::Cnot, &[1, 2]);
        let out = compile(&c, &dev, &passes, 7, &CompileOptions::default()).unwrap();
        let text = compile_output_to_json(&out, &passes, 7).unwrap();
        assert!(text.contains("\"twirl_records\""));
        assert!(text.contains("\"compensation\""));
        let back = read_any_circuit(&text).unwrap().to_scheduled().unwrap();
        assert_eq!(back, out.circuit);
    }
}
