//! Dispatch of a [`RunConfig`] to the diagnostics. Independent sections run
//! concurrently; the report keeps the planned order.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::config::{Command, ExampleName, RunConfig};
use crate::error::{Error, Result};
use crate::function_spaces::{
    auto_grid, hermite_closed_form, hermite_values, number_operator_model, schwartz_hermite_model, sobolev_basis,
    sobolev_multiplier, tail_mass, SobolevBasis,
};
use crate::io::{load_matrix, load_vector};
use crate::linalg::{max_abs, random_unit_vector, stream_rng, CMat, CVec, C64};
use crate::operator::LinearMap;
use crate::par::{self, Exec};
use crate::pseudo_hermitian::{density_diagnostic, PairSpec};
use crate::report::{save_report, DiagnosticsReport, Section};
use crate::riesz::{
    equivalence_check, hilbert_triplet_realization, make_riesz_like, range_membership, rebuild_from_s,
    strictness_report, RangeMembership, RieszLikeBasis, StrictnessReport,
};
use crate::sequence::{ProbeOptions, SequenceFamily};
use crate::trend::Ladder;
use crate::triplet::{CoefVector, Space};
use crate::verdict::Verdict;

const DEFAULT_DIM: usize = 8;
const DEFAULT_COUNT: usize = 10;
const DEFAULT_PAIR_DIM: usize = 32;
const CONSTRUCTION_TOL: f64 = 1e-10;
const ROUND_TRIP_TOL: f64 = 1e-12;
const WEAK_TOL: f64 = 1e-12;
const ALIASING_TOL: f64 = 1e-10;

type Evidence = Vec<(String, f64)>;
type JobFn<'a> = Box<dyn Fn() -> Result<Vec<Section>> + Sync + Send + 'a>;

struct Job<'a> {
    name: String,
    run: JobFn<'a>,
}

fn job<'a>(name: impl Into<String>, run: impl Fn() -> Result<Vec<Section>> + Sync + Send + 'a) -> Job<'a> {
    Job {
        name: name.into(),
        run: Box::new(run),
    }
}

fn ev(label: impl Into<String>, v: f64) -> (String, f64) {
    (label.into(), v)
}

fn per_size(prefix: &str, sizes: &[usize], vals: &[f64]) -> Evidence {
    sizes
        .iter()
        .zip(vals)
        .map(|(n, v)| ev(format!("{prefix}@N={n}"), *v))
        .collect()
}

/// Build the report for `config` without writing it.
pub fn run(config: &RunConfig) -> Result<DiagnosticsReport> {
    run_with(config, Exec::default())
}

pub fn run_with(config: &RunConfig, exec: Exec) -> Result<DiagnosticsReport> {
    config.validate()?;
    let ctx = Ctx { cfg: config, exec };
    let jobs = ctx.plan()?;
    let results = par::try_map(exec, &jobs, |j| -> Result<(Vec<Section>, f64)> {
        let start = Instant::now();
        let sections = (j.run)()?;
        Ok((sections, start.elapsed().as_secs_f64() * 1e3))
    })?;
    let mut report = DiagnosticsReport::new(config.command.as_str(), config.seed, config.hash());
    let mut timing = BTreeMap::new();
    for (j, (sections, ms)) in jobs.iter().zip(results) {
        report.sections.extend(sections);
        timing.insert(j.name.clone(), ms);
    }
    if config.timing {
        report.timing = Some(timing);
    }
    Ok(report)
}

/// [`run`], then write the report to the configured output path, if any.
pub fn execute(config: &RunConfig) -> Result<DiagnosticsReport> {
    let report = run(config)?;
    if let Some(path) = &config.output.path {
        save_report(&report, path, config.output.format)?;
    }
    Ok(report)
}

#[derive(Clone, Copy)]
struct Ctx<'a> {
    cfg: &'a RunConfig,
    exec: Exec,
}

enum Subject {
    Basis(RieszLikeBasis),
    Family(SequenceFamily),
}

impl Subject {
    fn family(&self) -> &SequenceFamily {
        match self {
            Subject::Basis(b) => b.family(),
            Subject::Family(f) => f,
        }
    }
}

impl<'a> Ctx<'a> {
    fn dim(&self) -> usize {
        self.cfg.model.dim.unwrap_or(DEFAULT_DIM)
    }

    fn count(&self) -> usize {
        self.cfg.count.unwrap_or(DEFAULT_COUNT)
    }

    fn levels(&self) -> usize {
        self.cfg.model.levels
    }

    fn ladder(&self, default_start: usize) -> Ladder {
        self.cfg.model.ladder_or(default_start)
    }

    fn probe(&self) -> Option<ProbeOptions> {
        self.cfg.seed.map(|seed| ProbeOptions {
            trials: self.cfg.tolerances.probe_trials,
            seed,
            bound: self.cfg.tolerances.probe_bound,
        })
    }

    fn plan(&self) -> Result<Vec<Job<'a>>> {
        let cfg = self.cfg;
        let me = Ctx { cfg, exec: self.exec };
        let mut jobs = Vec::new();
        match cfg.command {
            Command::CheckBiorthogonal => {
                let fam = me.input_family()?.expect("validated inputs");
                jobs.push(job("biorthogonality", move || {
                    Ok(vec![me.biorthogonality("biorthogonality", &fam)?])
                }));
            }
            Command::FrameReport => {
                let fam = me.input_family()?.expect("validated inputs");
                jobs.push(job("frame", move || {
                    let (fam, rf) = me.with_dual(fam.clone())?;
                    let mut out = rf.into_iter().collect::<Vec<_>>();
                    out.push(me.frame("frame", &fam)?);
                    Ok(out)
                }));
            }
            Command::RieszFischer => {
                let fam = me.input_family()?.expect("validated inputs");
                jobs.push(job("riesz-fischer", move || {
                    Ok(vec![me.riesz_fischer("riesz-fischer", &fam)?])
                }));
            }
            Command::Bessel => {
                let subject = me.subject()?;
                jobs.push(job("bessel", move || {
                    let (fam, rf) = me.with_dual(subject.family().clone())?;
                    let mut out = rf.into_iter().collect::<Vec<_>>();
                    out.push(me.bessel("bessel", &fam)?);
                    Ok(out)
                }));
            }
            Command::Reconstruct => {
                let subject = me.subject()?;
                jobs.push(job("reconstruction", move || {
                    let (fam, _) = me.with_dual(subject.family().clone())?;
                    Ok(vec![me.reconstruction("reconstruction", &fam)?])
                }));
            }
            Command::Strictness => jobs.extend(me.strictness_jobs()?),
            Command::Example => {
                let name = cfg.example.expect("validated example");
                jobs.extend(me.example_jobs(name));
            }
            Command::PseudoHermitian => jobs.extend(me.pair_jobs()),
            Command::FullReport => {
                let names: Vec<ExampleName> = match cfg.example {
                    Some(e) => vec![e],
                    None => ExampleName::ALL.to_vec(),
                };
                for name in names {
                    jobs.extend(me.example_jobs(name));
                }
                jobs.extend(me.pair_jobs());
            }
        }
        Ok(jobs)
    }

    // ---- inputs

    fn input_family(&self) -> Result<Option<SequenceFamily>> {
        let inputs = &self.cfg.inputs;
        let Some(xi_path) = &inputs.xi else { return Ok(None) };
        let xi = load_matrix(xi_path, None)?;
        let mut fam = SequenceFamily::new(xi.clone(), self.cfg.model.triplet(xi.nrows())?)?
            .with_tolerance(self.cfg.tolerances.biorthogonality);
        if let Some(z_path) = &inputs.zeta {
            fam = fam.with_dual(load_matrix(z_path, Some(xi.shape()))?)?;
        }
        Ok(Some(fam))
    }

    fn input_basis(&self) -> Result<Option<RieszLikeBasis>> {
        let Some(t_path) = &self.cfg.inputs.t else {
            return Ok(None);
        };
        let t = load_matrix(t_path, None)?;
        if !t.is_square() {
            return Err(Error::Dimension(format!(
                "{}: T is {}x{}, expected square",
                t_path.display(),
                t.nrows(),
                t.ncols()
            )));
        }
        let triplet = self.cfg.model.triplet(t.nrows())?;
        Ok(Some(make_riesz_like(LinearMap::new(t), triplet)?))
    }

    /// Input `T`, else input `Ξ`, else the configured (or number-operator) example.
    fn subject(&self) -> Result<Subject> {
        if let Some(b) = self.input_basis()? {
            return Ok(Subject::Basis(b));
        }
        if let Some(f) = self.input_family()? {
            return Ok(Subject::Family(f));
        }
        match self.cfg.example.unwrap_or(ExampleName::NumberOp) {
            ExampleName::NumberOp => Ok(Subject::Basis(number_operator_model(self.dim(), self.levels())?.1)),
            ExampleName::Schwartz => Ok(Subject::Family(schwartz_hermite_model(self.dim(), self.levels())?.1)),
            ExampleName::Sobolev => {
                let m = self.count();
                Ok(Subject::Family(sobolev_basis(&auto_grid(m)?, m)?.family))
            }
            ExampleName::Hermite => Err(Error::Config(format!(
                "example hermite has no sequence family; command {} needs number-op, schwartz, sobolev or input files",
                self.cfg.command.as_str()
            ))),
        }
    }

    fn vector_input(&self, path: &Option<std::path::PathBuf>, n: usize) -> Result<Option<CVec>> {
        path.as_ref().map(|p| load_vector(p, Some(n))).transpose()
    }

    /// Attach a minimal-norm dual when the family has none; the check itself
    /// becomes a section.
    fn with_dual(&self, fam: SequenceFamily) -> Result<(SequenceFamily, Option<Section>)> {
        if fam.dual().is_some() {
            return Ok((fam, None));
        }
        let section = self.riesz_fischer("riesz-fischer", &fam)?;
        let (fam, check) = fam.ensure_dual()?;
        if fam.dual().is_none() {
            return Err(Error::State(format!("no dual family: {}", check.note)));
        }
        Ok((fam, Some(section)))
    }

    // ---- plans

    fn strictness_jobs(&self) -> Result<Vec<Job<'a>>> {
        let me = Ctx {
            cfg: self.cfg,
            exec: self.exec,
        };
        if let Some(basis) = self.input_basis()? {
            // a single size cannot carry a trend
            let ladder = Ladder::new(vec![basis.dim()]).expect("positive size");
            return Ok(vec![job("strictness", move || {
                let report = strictness_report(&ladder, me.exec, |_| Ok(basis.family().clone()))?;
                me.strictness_sections("strictness", &report, Some(basis.clone()))
            })]);
        }
        let name = self.cfg.example.unwrap_or(ExampleName::NumberOp);
        if name == ExampleName::Hermite {
            return Err(Error::Config("example hermite has no strictness ladder".into()));
        }
        Ok(vec![me.example_strictness_job(name)])
    }

    fn example_strictness_job(&self, name: ExampleName) -> Job<'a> {
        let me = Ctx {
            cfg: self.cfg,
            exec: self.exec,
        };
        let prefix = name.as_str();
        job(format!("{prefix}/strictness"), move || {
            let levels = me.levels();
            let section = format!("{prefix}/strictness");
            match name {
                ExampleName::NumberOp => {
                    let ladder = me.ladder(me.dim());
                    let report = strictness_report(&ladder, me.exec, |n| {
                        Ok(number_operator_model(n, levels)?.1.family().clone())
                    })?;
                    let basis = number_operator_model(me.dim(), levels)?.1;
                    me.strictness_sections(&section, &report, Some(basis))
                }
                ExampleName::Schwartz => {
                    let ladder = me.ladder(me.dim());
                    let report = strictness_report(&ladder, me.exec, |n| Ok(schwartz_hermite_model(n, levels)?.1))?;
                    me.strictness_sections(&section, &report, None)
                }
                ExampleName::Sobolev => {
                    let ladder = me
                        .cfg
                        .model
                        .ladder
                        .clone()
                        .unwrap_or_else(|| Ladder::doubling(me.count(), 4));
                    let report = strictness_report(&ladder, me.exec, |m| Ok(sobolev_basis(&auto_grid(m)?, m)?.family))?;
                    me.strictness_sections(&section, &report, None)
                }
                ExampleName::Hermite => Ok(Vec::new()),
            }
        })
    }

    fn example_jobs(&self, name: ExampleName) -> Vec<Job<'a>> {
        let me = Ctx {
            cfg: self.cfg,
            exec: self.exec,
        };
        let prefix = name.as_str();
        let s = move |part: &str| format!("{prefix}/{part}");
        let mut jobs = Vec::new();
        match name {
            ExampleName::NumberOp | ExampleName::Schwartz => {
                let family_at = move || -> Result<(Option<RieszLikeBasis>, SequenceFamily)> {
                    if name == ExampleName::NumberOp {
                        let b = number_operator_model(me.dim(), me.levels())?.1;
                        let f = b.family().clone();
                        Ok((Some(b), f))
                    } else {
                        Ok((None, schwartz_hermite_model(me.dim(), me.levels())?.1))
                    }
                };
                jobs.push(job(s("sequence"), move || {
                    let (basis, fam) = family_at()?;
                    let mut out = Vec::new();
                    if let Some(b) = &basis {
                        out.push(me.construction(&s("construction"), b)?);
                    }
                    out.push(me.biorthogonality(&s("biorthogonality"), &fam)?);
                    let bare = SequenceFamily::new(fam.family().clone(), fam.triplet().clone())?;
                    out.push(me.riesz_fischer(&s("riesz-fischer"), &bare)?);
                    out.push(me.frame(&s("frame"), &fam)?);
                    out.push(me.bessel(&s("bessel"), &fam)?);
                    if let Some(probe) = me.probe() {
                        out.push(me.equivalence(&s("equivalence"), &fam, &probe)?);
                    }
                    out.push(me.reconstruction(&s("reconstruction"), &fam)?);
                    Ok(out)
                }));
                jobs.push(me.example_strictness_job(name));
                if name == ExampleName::NumberOp {
                    jobs.push(job(s("range"), move || {
                        let ladder = me.ladder(me.dim());
                        let levels = me.levels();
                        let basis_at = |n| Ok(number_operator_model(n, levels)?.1);
                        let ones = range_membership(&ladder, me.exec, basis_at, |n| {
                            CoefVector::from_real(&vec![1.0; n], Space::Ddual)
                        })?;
                        let linear = range_membership(&ladder, me.exec, basis_at, |n| {
                            CoefVector::from_real(&(1..=n).map(|k| k as f64).collect::<Vec<_>>(), Space::Ddual)
                        })?;
                        Ok(vec![
                            me.range(&s("range-ones"), &ones)?,
                            me.range(&s("range-linear"), &linear)?,
                        ])
                    }));
                }
            }
            ExampleName::Hermite => {
                jobs.push(job(s("functions"), move || Ok(vec![me.hermite(&s("functions"))?])));
            }
            ExampleName::Sobolev => {
                jobs.push(job(s("basis"), move || {
                    let m = me.count();
                    let basis = sobolev_basis(&auto_grid(m)?, m)?;
                    let fam = basis.family.clone().with_tolerance(me.cfg.tolerances.biorthogonality);
                    Ok(vec![
                        me.sobolev(&s("basis"), &basis)?,
                        me.biorthogonality(&s("biorthogonality"), &fam)?,
                    ])
                }));
                jobs.push(me.example_strictness_job(name));
            }
        }
        jobs
    }

    fn pair_jobs(&self) -> Vec<Job<'a>> {
        let me = Ctx {
            cfg: self.cfg,
            exec: self.exec,
        };
        let spec = self
            .cfg
            .pair
            .clone()
            .unwrap_or_else(|| PairSpec::demo(self.cfg.seed.unwrap_or(0)));
        let spec2 = spec.clone();
        vec![
            job("pseudo-hermitian/pair", move || {
                Ok(vec![me.pair("pseudo-hermitian/pair", &spec)?])
            }),
            job("pseudo-hermitian/trends", move || {
                me.pair_trends("pseudo-hermitian", &spec2)
            }),
        ]
    }

    // ---- sections

    fn finish(&self, mut section: Section, fam: &SequenceFamily) -> Section {
        if fam.is_tainted() {
            section.record("tainted", true).expect("bool serializes");
            section.taint();
        }
        section
    }

    fn construction(&self, name: &str, basis: &RieszLikeBasis) -> Result<Section> {
        let r = basis.construction_residuals();
        let mut s = Section::new(name);
        s.record("dim", basis.dim())?
            .record("t_xi_residual", r.t_xi)?
            .record("zeta_adjoint_residual", r.zeta_adjoint)?
            .record("t_dagger_t_xi_residual", r.t_dag_t_xi)?
            .record("certificates", basis.t().certificate_entries())?
            .record("adjoint_domain_dimension", basis.adjoint_domain_dimension())?;
        let tol = CONSTRUCTION_TOL * max_abs(basis.t().matrix()).max(1.0);
        s.verdict(
            "construction",
            Verdict::from_bool(r.max() <= tol),
            [
                ev("t_xi", r.t_xi),
                ev("zeta_adjoint", r.zeta_adjoint),
                ev("t_dagger_t_xi", r.t_dag_t_xi),
                ev("tolerance", tol),
            ],
        )?;
        Ok(self.finish(s, basis.family()))
    }

    fn biorthogonality(&self, name: &str, fam: &SequenceFamily) -> Result<Section> {
        let r = fam.biorthogonality_residual()?;
        let mut s = Section::new(name);
        s.record("dim", fam.dim())?
            .record("len", fam.len())?
            .record("residual", r)?
            .record("tolerance", fam.tolerance())?;
        s.verdict(
            "biorthogonal",
            Verdict::from_bool(r <= fam.tolerance()),
            [ev("residual", r), ev("tolerance", fam.tolerance())],
        )?;
        Ok(self.finish(s, fam))
    }

    fn riesz_fischer(&self, name: &str, fam: &SequenceFamily) -> Result<Section> {
        let check = fam.riesz_fischer_check();
        let mut s = Section::new(name);
        s.record("rank", check.rank)?
            .record("len", fam.len())?
            .record("residual", check.residual)?
            .record("v_surjective", fam.v_surjective())?
            .record("note", &check.note)?;
        if let Some(map) = &check.s {
            s.record("certificates", map.certificate_entries())?;
        }
        s.verdict(
            "riesz-fischer",
            check.verdict,
            [
                ev("rank", check.rank as f64),
                ev("len", fam.len() as f64),
                ev("residual", check.residual),
            ],
        )?;
        Ok(s)
    }

    fn frame(&self, name: &str, fam: &SequenceFamily) -> Result<Section> {
        let frame = fam.frame_operator()?;
        let min_eig = fam.frame_min_eigenvalue()?;
        let w = fam.bessel_w_factor()?;
        let mut s = Section::new(name);
        s.record("min_eigenvalue", min_eig)?
            .record("certificates", frame.certificate_entries())?
            .record("w_factor_certificates", w.certificate_entries())?;
        let tol = fam.tolerance() * max_abs(frame.matrix()).max(1.0);
        s.verdict(
            "positive",
            Verdict::from_bool(min_eig >= -tol),
            [ev("min_eigenvalue", min_eig), ev("tolerance", tol)],
        )?;
        Ok(self.finish(s, fam))
    }

    fn bessel(&self, name: &str, fam: &SequenceFamily) -> Result<Section> {
        let levels: Vec<usize> = (1..=fam.triplet().levels()).collect();
        let bounds = levels
            .iter()
            .map(|&j| fam.bessel_bound(j))
            .collect::<Result<Vec<f64>>>()?;
        let mut s = Section::new(name);
        s.record("levels", &levels)?.record("bounds", &bounds)?;
        match self.cfg.seed {
            Some(seed) => {
                let samples = self.cfg.tolerances.bessel_samples;
                let sampled = levels
                    .iter()
                    .map(|&j| fam.bessel_sampled_sup(j, samples, seed, self.exec))
                    .collect::<Result<Vec<f64>>>()?;
                s.record("samples", samples)?.record("sampled_sup", &sampled)?;
                for ((j, b), m) in levels.iter().zip(&bounds).zip(&sampled) {
                    let ok = *m <= b * (1.0 + 1e-12);
                    s.verdict(
                        format!("bessel-level-{j}"),
                        Verdict::from_bool(ok),
                        [ev("bound", *b), ev("sampled_sup", *m)],
                    )?;
                }
            }
            None => {
                for (j, b) in levels.iter().zip(&bounds) {
                    s.verdict(
                        format!("bessel-level-{j}"),
                        Verdict::from_bool(b.is_finite()),
                        [ev("bound", *b)],
                    )?;
                }
            }
        }
        Ok(self.finish(s, fam))
    }

    fn equivalence(&self, name: &str, fam: &SequenceFamily, probe: &ProbeOptions) -> Result<Section> {
        let t = equivalence_check(fam, probe)?;
        let (_, gram) = rebuild_from_s(&t.s, fam);
        let mut s = Section::new(name);
        s.record("s_residual", t.s_residual)?
            .record("s_hermitian_residual", t.s_hermitian_residual)?
            .record("s_min_eigenvalue", t.s_min_eigenvalue)?
            .record("positivity_deviation", t.positivity_abs)?
            .record("p_zeta_constants", &t.p_zeta_constants)?
            .record("p_zeta_sampled", &t.p_zeta_sampled)?
            .record("p_zeta_level", t.p_zeta_level)?
            .record("rebuild_gram_residual", gram)?
            .record("trials", probe.trials)?;
        let mut evidence = vec![
            ev("s_residual", t.s_residual),
            ev("s_min_eigenvalue", t.s_min_eigenvalue),
            ev("positivity_deviation", t.positivity_abs),
        ];
        evidence.extend(
            t.p_zeta_constants
                .iter()
                .enumerate()
                .map(|(j, c)| ev(format!("p_zeta_constant@level={j}"), *c)),
        );
        s.verdict("equivalence", t.verdict, evidence)?;
        let tol = self.cfg.tolerances.gram;
        s.verdict(
            "rebuild",
            Verdict::from_bool(gram <= tol),
            [ev("gram_residual", gram), ev("tolerance", tol)],
        )?;
        Ok(self.finish(s, fam))
    }

    fn strictness_sections(
        &self,
        name: &str,
        r: &StrictnessReport,
        basis: Option<RieszLikeBasis>,
    ) -> Result<Vec<Section>> {
        let mut s = Section::new(name);
        let levels = r.points.first().map_or(0, |p| p.upper.len());
        let uppers: Vec<Vec<f64>> = (0..levels).map(|q| r.upper_constants(q)).collect();
        s.record("ladder", &r.ladder)?
            .record("lower", r.lower_constants())?
            .record("upper", &uppers)?
            .record("rank_full", r.points.iter().map(|p| p.rank_full).collect::<Vec<_>>())?
            .record("lower_slope", r.lower_slope)?
            .record("upper_slopes", &r.upper_slopes)?
            .record("note", r.note)?;
        let mut evidence = vec![ev("lower_slope", r.lower_slope.unwrap_or(f64::NAN))];
        for (q, sl) in r.upper_slopes.iter().enumerate() {
            evidence.push(ev(format!("upper_slope@level={q}"), sl.unwrap_or(f64::NAN)));
        }
        evidence.extend(per_size("lower", &r.ladder, &r.lower_constants()));
        for (q, u) in uppers.iter().enumerate() {
            evidence.extend(per_size(&format!("upper@level={q}"), &r.ladder, u));
        }
        s.verdict("strictness", r.verdict, evidence)?;
        let mut out = vec![s];
        if let (Some(basis), Verdict::Strict) = (basis, r.verdict) {
            let basis = basis.with_strictness(r);
            let real = hilbert_triplet_realization(&basis)?;
            let mut t = Section::new(name.replace("strictness", "realization"));
            t.record("weights", real.triplet.weights())?
                .record("plus_gram_residual", real.plus_gram_residual)?
                .record("minus_gram_residual", real.minus_gram_residual)?
                .record("dual_norms", &real.dual_norms)?;
            let tol = self.cfg.tolerances.gram;
            let ok = real.plus_gram_residual <= tol && real.minus_gram_residual <= tol;
            t.verdict(
                "hilbert-triplet",
                Verdict::from_bool(ok),
                [
                    ev("plus_gram_residual", real.plus_gram_residual),
                    ev("minus_gram_residual", real.minus_gram_residual),
                    ev("tolerance", tol),
                ],
            )?;
            out.push(t);
        }
        Ok(out)
    }

    fn range(&self, name: &str, r: &RangeMembership) -> Result<Section> {
        let mut s = Section::new(name);
        s.record("ladder", &r.ladder)?
            .record("sq_sums", &r.sq_sums)?
            .record("preimage_residuals", &r.preimage_residuals)?
            .record("increment_slope", r.increment_slope)?
            .record("note", r.note)?;
        let mut evidence = per_size("sq_sum", &r.ladder, &r.sq_sums);
        evidence.push(ev("increment_slope", r.increment_slope.unwrap_or(f64::NAN)));
        evidence.push(ev(
            "max_preimage_residual",
            r.preimage_residuals.iter().copied().fold(0.0, f64::max),
        ));
        s.verdict("in-range", r.in_range, evidence)?;
        Ok(s)
    }

    /// Partial-sum errors for `f` (input, or coordinates `2^{-k}`) and the weak
    /// expansion residual against `Ψ` (input, or all ones).
    fn reconstruction(&self, name: &str, fam: &SequenceFamily) -> Result<Section> {
        let n = fam.dim();
        let m = fam.len();
        let f = self
            .vector_input(&self.cfg.inputs.f, n)?
            .unwrap_or_else(|| CVec::from_fn(n, |k, _| C64::new(0.5f64.powi(k as i32 + 1), 0.0)));
        let psi = self
            .vector_input(&self.cfg.inputs.psi, n)?
            .unwrap_or_else(|| CVec::from_element(n, C64::new(1.0, 0.0)));
        let f = CoefVector::new(f, Space::D);
        let psi = CoefVector::new(psi, Space::Ddual);
        let errors = (0..=m)
            .map(|k| Ok((&f.coords - fam.partial_sum(&f, k)?.coords).norm()))
            .collect::<Result<Vec<f64>>>()?;
        let ratios: Vec<Option<f64>> = errors.windows(2).map(|w| (w[0] > 0.0).then(|| w[1] / w[0])).collect();
        let weak = fam.weak_expansion_residual(&psi, &f, m)?;
        let scale = (psi.coords.norm() * f.coords.norm()).max(1.0);
        let mut s = Section::new(name);
        s.record("errors", &errors)?
            .record("ratios", &ratios)?
            .record("weak_residual", weak)?;
        let last = *errors.last().expect("at least one error");
        let tol = fam.tolerance() * f.coords.norm().max(1.0);
        s.verdict(
            "partial-sums",
            Verdict::from_bool(last <= tol),
            [
                ev("final_error", last),
                ev("initial_error", errors[0]),
                ev("tolerance", tol),
            ],
        )?;
        s.verdict(
            "weak-expansion",
            Verdict::from_bool(weak <= WEAK_TOL * scale),
            [ev("residual", weak), ev("tolerance", WEAK_TOL * scale)],
        )?;
        Ok(self.finish(s, fam))
    }

    fn hermite(&self, name: &str) -> Result<Section> {
        let m = self.count();
        let grid = auto_grid(m)?;
        let at_zero = hermite_values(0.0, m.max(2));
        let closed = grid
            .nodes()
            .iter()
            .flat_map(|&x| {
                let v = hermite_values(x, 3);
                (0..3).map(move |k| (v[k] - hermite_closed_form(k, x).expect("closed form for n <= 2")).abs())
            })
            .fold(0.0, f64::max);
        let tails = tail_mass(&grid, m);
        let basis = crate::function_spaces::hermite_basis(&grid, m)?;
        let mut gram = CMat::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                gram[(i, j)] = basis[j].inner(&basis[i])?;
            }
        }
        let gram_residual = crate::linalg::identity_residual(&gram);
        let phi0_err = (at_zero[0] - std::f64::consts::PI.powf(-0.25)).abs();
        let mut s = Section::new(name);
        s.record("half_width", grid.half_width())?
            .record("points", grid.points())?
            .record("count", m)?
            .record("values_at_zero", &at_zero[..m])?
            .record("closed_form_residual", closed)?
            .record("tail_mass", &tails)?
            .record("gram_residual", gram_residual)?;
        s.verdict(
            "values",
            Verdict::from_bool(phi0_err <= 1e-12 && at_zero[1].abs() <= 1e-12 && closed <= 1e-12),
            [
                ev("phi0_error", phi0_err),
                ev("phi1_at_zero", at_zero[1]),
                ev("closed_form_residual", closed),
            ],
        )?;
        let tol = self.cfg.tolerances.gram;
        s.verdict(
            "orthonormal",
            Verdict::from_bool(gram_residual <= tol),
            [ev("gram_residual", gram_residual), ev("tolerance", tol)],
        )?;
        Ok(s)
    }

    fn sobolev(&self, name: &str, b: &SobolevBasis) -> Result<Section> {
        let round_trip = |s1: f64, s2: f64| -> Result<f64> {
            let mut worst = 0.0f64;
            for f in &b.hermite {
                let back = sobolev_multiplier(&b.grid, s2, &sobolev_multiplier(&b.grid, s1, f)?)?;
                worst = worst.max(back.distance(f)?);
            }
            Ok(worst)
        };
        let down_up = round_trip(-1.0, 1.0)?;
        let up_down = round_trip(1.0, -1.0)?;
        let (lo, hi) = b
            .norm_ratios
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
        let tol = self.cfg.tolerances.gram;
        let mut s = Section::new(name);
        s.record("half_width", b.grid.half_width())?
            .record("points", b.grid.points())?
            .record("count", b.xi.len())?
            .record("construction_residual", b.construction_residual)?
            .record("hermite_gram_residual", b.hermite_gram_residual)?
            .record("modified_gram_residual", b.modified_gram_residual)?
            .record("round_trip_residual", [down_up, up_down])?
            .record("xi_norms", &b.xi_norms)?
            .record("norm_ratios", &b.norm_ratios)?
            .record("aliasing", b.aliasing)?;
        s.verdict(
            "construction",
            Verdict::from_bool(b.construction_residual <= CONSTRUCTION_TOL),
            [
                ev("residual", b.construction_residual),
                ev("tolerance", CONSTRUCTION_TOL),
            ],
        )?;
        s.verdict(
            "hermite-gram",
            Verdict::from_bool(b.hermite_gram_residual <= tol),
            [ev("residual", b.hermite_gram_residual), ev("tolerance", tol)],
        )?;
        s.verdict(
            "modified-gram",
            Verdict::from_bool(b.modified_gram_residual <= tol),
            [ev("residual", b.modified_gram_residual), ev("tolerance", tol)],
        )?;
        s.verdict(
            "round-trip",
            Verdict::from_bool(down_up.max(up_down) <= ROUND_TRIP_TOL),
            [
                ev("down_up", down_up),
                ev("up_down", up_down),
                ev("tolerance", ROUND_TRIP_TOL),
            ],
        )?;
        let ratio_ok = lo >= 1.0 - 1e-12 && hi <= std::f64::consts::SQRT_2 + 1e-12;
        s.verdict(
            "norm-equivalence",
            Verdict::from_bool(ratio_ok),
            [ev("min_ratio", lo), ev("max_ratio", hi)],
        )?;
        s.verdict(
            "aliasing",
            Verdict::from_bool(b.aliasing < ALIASING_TOL),
            [ev("near_nyquist_fraction", b.aliasing), ev("tolerance", ALIASING_TOL)],
        )?;
        Ok(s)
    }

    fn pair(&self, name: &str, spec: &PairSpec) -> Result<Section> {
        let n = self.cfg.model.dim.unwrap_or(DEFAULT_PAIR_DIM);
        let p = spec.build(n)?;
        let pairs = self.cfg.tolerances.similarity_pairs;
        let seed = self.cfg.seed.unwrap_or(0);
        let weak = par::try_map_range(self.exec, pairs, |t| {
            let mut rng = stream_rng(seed, t as u64);
            let xi = CoefVector::new(random_unit_vector(&mut rng, n), Space::D);
            let eta = CoefVector::new(random_unit_vector(&mut rng, n), Space::H);
            p.weak_similarity_residual(&xi, &eta)
        })?
        .into_iter()
        .fold(0.0, f64::max);
        let eig = p.eigen_residual();
        let spec_err = p.spectrum_error();
        let nn = p.non_normality();
        let mut s = Section::new(name);
        s.record("dim", n)?
            .record("eigenvalues", p.eigenvalues())?
            .record("repeated_eigenvalues", p.has_repeated_eigenvalues())?
            .record("hsa_hermitian_residual", p.hsa_hermitian_residual())?
            .record("hsa_eigen_residual", p.hsa_eigen_residual())?
            .record("xi_residual", p.xi_residual())?
            .record("eigen_residual", eig)?
            .record("weak_similarity_residual", weak)?
            .record("weak_similarity_pairs", pairs)?
            .record("spectrum_error", spec_err)?
            .record("non_normality", nn)?;
        let scale = max_abs(p.h().matrix()).max(1.0);
        s.verdict(
            "eigenpairs",
            Verdict::from_bool(eig <= CONSTRUCTION_TOL * scale),
            [ev("eigen_residual", eig), ev("tolerance", CONSTRUCTION_TOL * scale)],
        )?;
        s.verdict(
            "weak-similarity",
            Verdict::from_bool(weak <= CONSTRUCTION_TOL * scale),
            [
                ev("max_residual", weak),
                ev("pairs", pairs as f64),
                ev("tolerance", CONSTRUCTION_TOL * scale),
            ],
        )?;
        s.verdict(
            "spectrum",
            Verdict::from_bool(spec_err <= 1e-8 * scale),
            [ev("spectrum_error", spec_err)],
        )?;
        Ok(s)
    }

    fn pair_trends(&self, prefix: &str, spec: &PairSpec) -> Result<Vec<Section>> {
        let ladder = self.ladder(DEFAULT_DIM);
        let d = density_diagnostic(spec, &ladder, self.exec)?;
        let mut s = Section::new(format!("{prefix}/density"));
        s.record("ladder", &d.ladder)?
            .record("admissible_ranks", &d.admissible_ranks)?
            .record("principal_angles", &d.principal_angles)?
            .record("probe_norms", &d.probe_norms)?
            .record("slope", d.slope)?
            .record("shape", d.shape)?
            .record("note", d.note)?;
        let mut evidence = per_size("probe_norm", &d.ladder, &d.probe_norms);
        evidence.push(ev("slope", d.slope.unwrap_or(f64::NAN)));
        s.verdict("density", d.verdict, evidence)?;
        let report = strictness_report(&ladder, self.exec, |n| spec.build(n)?.eigen_family())?;
        let mut out = vec![s];
        out.extend(self.strictness_sections(&format!("{prefix}/eigenbasis-strictness"), &report, None)?);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::save_matrix;

    fn example(name: ExampleName, dim: usize) -> RunConfig {
        let mut c = RunConfig::new(Command::Example);
        c.example = Some(name);
        c.model.dim = Some(dim);
        c.timing = false;
        c
    }

    fn f64_at(s: &Section, key: &str) -> f64 {
        s.get(key)
            .and_then(|v| v.as_f64())
            .unwrap_or_else(|| panic!("{key} missing"))
    }

    #[test]
    fn number_op_example_is_strict_with_unit_constants() {
        let r = run(&example(ExampleName::NumberOp, 4)).unwrap();
        let s = r.section("number-op/strictness").unwrap();
        assert_eq!(s.verdict_of("strictness"), Some(Verdict::Strict));
        let lower: Vec<f64> = serde_json::from_value(s.get("lower").unwrap().clone()).unwrap();
        let upper: Vec<Vec<f64>> = serde_json::from_value(s.get("upper").unwrap().clone()).unwrap();
        assert!(lower
            .iter()
            .chain(upper.iter().flatten())
            .all(|c| (c - 1.0).abs() < 1e-12));
        assert!(r.section("number-op/realization").is_some());
    }

    #[test]
    fn check_biorthogonal_identity_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("id.csv");
        save_matrix(&p, &CMat::identity(5, 5)).unwrap();
        let mut c = RunConfig::new(Command::CheckBiorthogonal);
        c.inputs.xi = Some(p.clone());
        c.inputs.zeta = Some(p);
        let r = run(&c).unwrap();
        let s = r.section("biorthogonality").unwrap();
        assert_eq!(f64_at(s, "residual"), 0.0);
        assert_eq!(s.verdict_of("biorthogonal"), Some(Verdict::Pass));
    }

    #[test]
    fn mismatched_dual_names_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("xi.csv"), dir.path().join("zeta.csv"));
        save_matrix(&a, &CMat::identity(3, 3)).unwrap();
        save_matrix(&b, &CMat::identity(4, 4)).unwrap();
        let mut c = RunConfig::new(Command::CheckBiorthogonal);
        c.inputs.xi = Some(a);
        c.inputs.zeta = Some(b);
        let e = run(&c).unwrap_err();
        assert!(e.to_string().contains("zeta.csv"), "{e}");
    }

    #[test]
    fn sobolev_full_report_has_small_gram_residual() {
        let mut c = RunConfig::new(Command::FullReport);
        c.example = Some(ExampleName::Sobolev);
        c.count = Some(10);
        c.seed = Some(1);
        let r = run(&c).unwrap();
        let s = r.section("sobolev/basis").unwrap();
        assert!(f64_at(s, "modified_gram_residual") <= 1e-8);
        assert_eq!(s.verdict_of("modified-gram"), Some(Verdict::Pass));
        assert_eq!(
            r.section("sobolev/strictness").unwrap().verdict_of("strictness"),
            Some(Verdict::Strict)
        );
    }

    #[test]
    fn reports_are_deterministic_across_execution_modes() {
        let mut c = RunConfig::new(Command::FullReport);
        c.example = Some(ExampleName::NumberOp);
        c.seed = Some(11);
        c.timing = false;
        c.tolerances.bessel_samples = 2000;
        let a = run_with(&c, Exec::Parallel).unwrap().to_json().unwrap();
        let b = run_with(&c, Exec::Sequential).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hermite_has_no_family_for_sequence_commands() {
        let mut c = RunConfig::new(Command::Reconstruct);
        c.example = Some(ExampleName::Hermite);
        assert!(matches!(run(&c), Err(Error::Config(_))));
    }
}
