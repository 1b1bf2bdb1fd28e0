#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "modalpf/io.hpp"
#include "modalpf/koopman.hpp"
#include "modalpf/model.hpp"
#include "modalpf/normalform.hpp"
#include "modalpf/pf.hpp"
#include "modalpf/sim.hpp"
#include "modalpf/spectrum.hpp"
#include "modalpf/variants.hpp"

namespace modalpf::cli {

namespace {

using json = nlohmann::json;

struct RunConfig {
  std::string model_path;
  std::string out_path;
  std::string format;
  std::string norm = "1";
  std::string scheme;
  std::string theta;
  int order = 2;
  std::string alpha;
  std::optional<double> res_tol;
};

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--model", cfg.model_path, "Model JSON")->required();
  cmd->add_option("--out", cfg.out_path, "Output file (stdout when omitted)");
  cmd->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--norm", cfg.norm, "Reference eigenvector norm: 1, 2 or inf");
}

void add_scaling(CLI::App* cmd, RunConfig& cfg) {
  auto* scheme = cmd->add_option("--scheme", cfg.scheme, "Scaling scheme I, II or III");
  auto* theta = cmd->add_option("--theta", cfg.theta, "Explicit theta-vector, comma separated");
  scheme->excludes(theta);
  theta->excludes(scheme);
  cmd->add_option("--res-tol", cfg.res_tol, "Resonance tolerance (default 1e-6 max|lambda|)");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur.erase(0, cur.find_first_not_of(" \t"));
    cur.erase(cur.find_last_not_of(" \t") + 1);
    if (!cur.empty()) parts.push_back(cur);
  }
  return parts;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
}

// Accepts "a", "bj", "a+bj", "a-bj".
cplx parse_complex(const std::string& s) {
  static const std::regex pattern(
      R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*(?:([+-]\s*(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)[jJi])?\s*$)");
  std::smatch m;
  if (s.empty() || !std::regex_match(s, m, pattern) || (!m[1].matched && !m[2].matched)) {
    // A lone imaginary like "2j" lands here.
    if (!s.empty() && (s.back() == 'j' || s.back() == 'J')) {
      return {0.0, parse_double(s.substr(0, s.size() - 1))};
    }
    throw UsageError("not a complex number: '" + s + "'");
  }
  double re = m[1].matched ? parse_double(m[1].str()) : 0.0;
  double im = 0.0;
  if (m[2].matched) {
    std::string t = m[2].str();
    t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
    im = (t == "+" || t == "-") ? (t == "+" ? 1.0 : -1.0) : parse_double(t);
  }
  return {re, im};
}

Eigen::VectorXcd parse_complex_list(const std::string& s) {
  const auto parts = split(s, ',');
  Eigen::VectorXcd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t j = 0; j < parts.size(); ++j) v[static_cast<Eigen::Index>(j)] = parse_complex(parts[j]);
  return v;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> v;
  for (const auto& p : split(s, ',')) v.push_back(parse_double(p));
  if (v.empty()) throw UsageError("empty list");
  return v;
}

// "r,s" (1-based) -> canonical 0-based tuple.
MultiIndex parse_tuple(const std::string& s, int n) {
  MultiIndex t;
  for (const auto& p : split(s, ',')) {
    const double v = parse_double(p);
    const int i = static_cast<int>(v);
    if (v != i || i < 1 || i > n) throw UsageError("mode index '" + p + "' out of range 1.." + std::to_string(n));
    t.push_back(i - 1);
  }
  if (t.empty()) throw UsageError("empty mode tuple");
  return canonical(std::move(t));
}

int check_index(int one_based, int n, const char* what) {
  if (one_based < 1 || one_based > n) {
    throw UsageError(std::string(what) + " index " + std::to_string(one_based) + " out of range 1.." +
                     std::to_string(n));
  }
  return one_based - 1;
}

struct Perturbation {
  int k = 0;
  double alpha = 1.0;
};

Perturbation parse_perturb(const std::string& s, int n) {
  Perturbation p;
  bool have_k = false;
  for (const auto& part : split(s, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw UsageError("--perturb expects k=<state>,alpha=<amplitude>");
    const std::string key = part.substr(0, eq);
    const std::string val = part.substr(eq + 1);
    if (key == "k") {
      const double v = parse_double(val);
      p.k = check_index(static_cast<int>(v), n, "state");
      have_k = true;
    } else if (key == "alpha") {
      p.alpha = parse_double(val);
    } else {
      throw UsageError("unknown --perturb key '" + key + "'");
    }
  }
  if (!have_k) throw UsageError("--perturb needs k=<state>");
  return p;
}

struct Loaded {
  PolynomialSystem sys;
  ModalBasis references;
  ModalBasis basis;
  std::string scheme_label;
};

Loaded load(const RunConfig& cfg) {
  PolynomialSystem sys = load_model(cfg.model_path);
  EigOptions opts;
  try {
    opts.norm = parse_norm(cfg.norm);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  ModalBasis refs = eigendecompose(sys, opts);
  ModalBasis basis = refs;
  std::string label = "I";
  if (!cfg.theta.empty()) {
    const Eigen::VectorXcd theta = parse_complex_list(cfg.theta);
    if (theta.size() != refs.n()) throw UsageError("--theta needs one value per mode");
    basis = apply_theta(refs, theta);
    label = "theta";
  } else {
    Scheme scheme = Scheme::I;
    if (!cfg.scheme.empty()) {
      try {
        scheme = parse_scheme(cfg.scheme);
      } catch (const ParseError& e) {
        throw UsageError(e.what());
      }
    }
    basis = apply_scheme(refs, scheme);
    label = to_string(scheme);
  }
  return {std::move(sys), std::move(refs), std::move(basis), label};
}

Eigen::VectorXcd alpha_vector(const std::string& spec, int n) {
  if (spec.empty()) return Eigen::VectorXcd::Ones(n);
  const Eigen::VectorXcd v = parse_complex_list(spec);
  if (v.size() == 1) return Eigen::VectorXcd::Constant(n, v[0]);
  if (v.size() != n) throw UsageError("--alpha needs one value or one per state");
  return v;
}

ExpansionOptions expansion_options(const RunConfig& cfg) {
  if (cfg.order < 1) throw UsageError("--order must be >= 1");
  ExpansionOptions o;
  o.order = cfg.order;
  o.tolerance = cfg.res_tol;
  return o;
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out_path.empty()) {
    out << text;
  } else {
    write_file(cfg.out_path, text);
  }
}

std::string trajectory_json(const Trajectory& traj) {
  json doc;
  doc["provenance"] = to_string(traj.provenance);
  doc["t0"] = traj.t0;
  doc["dt"] = traj.dt;
  json xs = json::array();
  for (const auto& s : traj.samples) xs.push_back(std::vector<double>(s.data(), s.data() + s.size()));
  doc["x"] = xs;
  return doc.dump();
}

std::string render_trajectory(const RunConfig& cfg, const Trajectory& traj) {
  return cfg.format == "json" ? trajectory_json(traj) : trajectory_csv(traj);
}

// ---- eig -------------------------------------------------------------------

int cmd_eig(const RunConfig& cfg, std::ostream& out) {
  const Loaded l = load(cfg);
  if (cfg.format == "csv") {
    std::ostringstream csv;
    csv << "mode,lambda_re,lambda_im,sigma_re,sigma_im,xi_re,xi_im,theta_re,theta_im,cos_delta_re,cos_delta_im\n";
    const auto& b = l.basis;
    for (int i = 0; i < b.n(); ++i) {
      csv << i + 1;
      for (const cplx v : {b.eigenvalues[i], b.sigma[i], b.xi[i], b.theta[i], b.cos_delta[i]}) {
        csv << ',' << format_real(v.real()) << ',' << format_real(v.imag());
      }
      csv << '\n';
    }
    emit(cfg, csv.str(), out);
  } else {
    emit(cfg, basis_json(l.basis, l.scheme_label) + "\n", out);
  }
  return 0;
}

// ---- pf --------------------------------------------------------------------

struct PFFlags {
  bool linear = false;
  std::vector<int> modes;
  std::vector<std::string> tuples;
  bool normalize = false;
  bool phase = false;
};

std::vector<MultiIndex> requested_tuples(const PFFlags& f, int n, int order) {
  std::vector<MultiIndex> tuples;
  for (int m : f.modes) tuples.push_back({check_index(m, n, "mode")});
  for (const auto& s : f.tuples) tuples.push_back(parse_tuple(s, n));
  for (const auto& t : tuples) {
    if (static_cast<int>(t.size()) > order) {
      throw UsageError("combination order M = " + std::to_string(t.size()) +
                       " exceeds normal-form order N = " + std::to_string(order));
    }
  }
  return tuples;
}

int cmd_pf(const RunConfig& cfg, const PFFlags& flags, std::ostream& out) {
  const Loaded l = load(cfg);
  const int n = l.basis.n();
  PFRequest req;
  req.include_linear = flags.linear;
  req.tuples = requested_tuples(flags, n, cfg.order);
  if (!req.include_linear && req.tuples.empty()) throw UsageError("pf needs --linear, --mode or --tuple");
  req.alpha = alpha_vector(cfg.alpha, n);
  req.normalize = flags.normalize;
  const NormalFormExpansion expansion = build_expansion(l.sys, l.basis, expansion_options(cfg));
  const PFReport report = build_pf_report(expansion, l.basis, req, l.scheme_label);
  emit(cfg, cfg.format == "json" ? pf_json(report) + "\n" : pf_csv(report, flags.phase), out);
  return 0;
}

// ---- sweep -----------------------------------------------------------------

struct SweepFlags {
  std::string what = "theta";
  std::string grid;
  bool invariance = false;
  int refactorizations = 100;
  std::uint64_t seed = 1;
};

double rel_dev(cplx a, cplx b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// Random complex scalings, conjugate-consistent across conjugate modes.
Eigen::VectorXcd random_scaling(const ModalBasis& basis, SplitMix64& rng) {
  Eigen::VectorXcd s(basis.n());
  for (int i = 0; i < basis.n(); ++i) {
    const int mate = basis.conjugate_mate(i);
    if (mate < i) {
      s[i] = std::conj(s[mate]);
      continue;
    }
    const double mag = std::exp(2.0 * rng.uniform() - 1.0);
    s[i] = std::polar(mag, 6.283185307179586 * rng.uniform());
  }
  return s;
}

int cmd_sweep(const RunConfig& cfg, const PFFlags& pf, const SweepFlags& sw, std::ostream& out) {
  const Loaded l = load(cfg);
  const int n = l.basis.n();
  const auto tuples = requested_tuples(pf, n, cfg.order);
  if (!pf.linear && tuples.empty()) throw UsageError("sweep needs --linear, --mode or --tuple");
  if (sw.what != "theta" && sw.what != "alpha") throw UsageError("--what must be theta or alpha");
  const std::vector<double> grid = sw.grid.empty() ? std::vector<double>{1.0} : parse_real_list(sw.grid);
  const Eigen::VectorXcd base_theta = l.basis.theta;
  const Eigen::VectorXcd base_alpha = alpha_vector(cfg.alpha, n);
  const NormalFormExpansion ref_exp = build_reference_expansion(l.sys, l.references, expansion_options(cfg));

  std::ostringstream csv;
  json rows = json::array();
  csv << "grid,state,mode_tuple,re,im,magnitude\n";
  auto record = [&](double g, int k, const MultiIndex& t, cplx v) {
    csv << format_real(g) << ',' << k + 1 << ',' << format_one_based(t) << ',' << format_real(v.real())
        << ',' << format_real(v.imag()) << ',' << format_real(std::abs(v)) << '\n';
    json jt = json::array();
    for (int x : t) jt.push_back(x + 1);
    rows.push_back({{"grid", g}, {"state", k + 1}, {"mode_tuple", jt}, {"value", {v.real(), v.imag()}}});
  };

  for (double g : grid) {
    const Eigen::VectorXcd theta = sw.what == "theta" ? Eigen::VectorXcd(base_theta * g) : base_theta;
    const Eigen::VectorXcd alpha =
        sw.what == "alpha" ? Eigen::VectorXcd(Eigen::VectorXcd::Constant(n, cplx(g))) : base_alpha;
    if (pf.linear) {
      const ModalBasis b = apply_theta(l.references, theta);
      const Eigen::MatrixXcd P = linear_pf(b.Phi(), b.Psi());
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) record(g, k, {i}, P(k, i));
      }
    }
    for (const auto& t : tuples) {
      for (int k = 0; k < n; ++k) {
        record(g, k, t, nonlinear_pf_theta(l.references, ref_exp, theta, k, t, alpha[k]).value);
      }
    }
  }
  emit(cfg, cfg.format == "json" ? rows.dump() + "\n" : csv.str(), out);

  if (sw.invariance) {
    // Refactor (sigma, xi) at the base theta and compare against the theta form.
    SplitMix64 rng(sw.seed);
    double worst_linear = 0.0, worst_nonlinear = 0.0;
    std::vector<MultiIndex> all = tuples;
    if (all.empty()) {
      for (int m = 1; m <= cfg.order; ++m) for_each_canonical(n, m, [&](const MultiIndex& t) { all.push_back(t); });
    }
    const ModalBasis target = apply_theta(l.references, base_theta);
    const Eigen::MatrixXcd P0 = linear_pf(target.Phi(), target.Psi());
    for (int r = 0; r < sw.refactorizations; ++r) {
      const Eigen::VectorXcd sigma = random_scaling(l.references, rng);
      const Eigen::VectorXcd xi = base_theta.cwiseQuotient(sigma.cwiseProduct(l.references.cos_delta));
      const ModalBasis b = apply_scaling(l.references, sigma, xi);
      const Eigen::MatrixXcd P = linear_pf(b.Phi(), b.Psi());
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) worst_linear = std::max(worst_linear, rel_dev(P(k, i), P0(k, i)));
      }
      const NormalFormExpansion e = build_expansion(l.sys, b, expansion_options(cfg));
      for (const auto& t : all) {
        for (int k = 0; k < n; ++k) {
          const cplx direct = nonlinear_pf(e, b.Phi(), b.Psi(), k, t, base_alpha[k]).value;
          const cplx theta_form = nonlinear_pf_theta(l.references, ref_exp, base_theta, k, t, base_alpha[k]).value;
          worst_nonlinear = std::max(worst_nonlinear, rel_dev(direct, theta_form));
        }
      }
    }
    json report{{"invariance",
                 {{"refactorizations", sw.refactorizations},
                  {"seed", sw.seed},
                  {"max_rel_deviation_linear", worst_linear},
                  {"max_rel_deviation_nonlinear", worst_nonlinear},
                  {"max_rel_deviation", std::max(worst_linear, worst_nonlinear)}}}};
    out << report.dump() << '\n';
  }
  return 0;
}

// ---- simulate / reconstruct --------------------------------------------------

struct TimeFlags {
  double dt = 1e-3;
  double T = 10.0;
  std::string perturb;
  std::string x0;
};

Eigen::VectorXd initial_state(const TimeFlags& tf, int n) {
  if (!tf.x0.empty()) {
    const auto v = parse_real_list(tf.x0);
    if (static_cast<int>(v.size()) != n) throw UsageError("--x0 needs one value per state");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
  }
  if (tf.perturb.empty()) throw UsageError("need --perturb k=..,alpha=.. or --x0");
  const Perturbation p = parse_perturb(tf.perturb, n);
  return perturb_state(n, p.k, p.alpha);
}

int cmd_simulate(const RunConfig& cfg, const TimeFlags& tf, std::ostream& out) {
  const PolynomialSystem sys = load_model(cfg.model_path);
  const Trajectory traj = integrate(sys, initial_state(tf, sys.n()), tf.dt, tf.T);
  emit(cfg, render_trajectory(cfg, traj), out);
  return 0;
}

struct ReconstructFlags {
  int mode = 0;
  std::string tuple;
  bool envelope = false;
  std::string inversion = "single";
};

int cmd_reconstruct(const RunConfig& cfg, const TimeFlags& tf, const ReconstructFlags& rf,
                    std::ostream& out, std::ostream& err) {
  const Loaded l = load(cfg);
  const int n = l.basis.n();
  if (rf.mode && !rf.tuple.empty()) throw UsageError("--mode and --tuple are mutually exclusive");
  if (rf.inversion != "single" && rf.inversion != "fixed-point") {
    throw UsageError("--inversion must be single or fixed-point");
  }
  const NormalFormExpansion expansion = build_expansion(l.sys, l.basis, expansion_options(cfg));
  if (((l.basis.theta.array() - 1.0).abs() > 1e-9).any()) {
    err << "warning: theta != 1, so the output is Phi exp(Lambda t) Psi x0 rather than the state response\n";
  }
  const Eigen::VectorXd x0 = initial_state(tf, n);
  const Eigen::VectorXcd z0 =
      z_from_state(expansion, l.basis.Psi(), x0.cast<cplx>(),
                   rf.inversion == "single" ? Inversion::single_pass : Inversion::fixed_point);
  const TimeGrid grid = TimeGrid::span(tf.dt, tf.T);

  Reconstruction rec;
  if (rf.mode || !rf.tuple.empty()) {
    const MultiIndex sel = rf.mode ? MultiIndex{check_index(rf.mode, n, "mode")} : parse_tuple(rf.tuple, n);
    if (static_cast<int>(sel.size()) > cfg.order) throw UsageError("combination order exceeds --order");
    rec = mode_component(expansion, l.basis.Phi(), z0, sel, grid);
    if (rf.envelope) {
      Trajectory env = rec.trajectory;
      env.samples = rec.envelope;
      rec.trajectory = env;
    }
  } else {
    if (rf.envelope) throw UsageError("--envelope needs --mode or --tuple");
    rec = reconstruct(expansion, l.basis.Phi(), z0, grid);
  }
  err << "max imaginary residue: " << format_real(rec.max_imag) << '\n';
  emit(cfg, render_trajectory(cfg, rec.trajectory), out);
  return 0;
}

// ---- variants ----------------------------------------------------------------

struct VariantFlags {
  std::string which = "pmispf";
  std::optional<std::uint64_t> seed;
  std::size_t samples = 10000;
  std::string dist = "uniform-sphere";
  double radius = 1.0;
  double guard = 0.1;
  int mode = 0;
  int state = 0;
  bool nonlinear_z = false;
  std::size_t members = 200;
  std::size_t steps = 20;
  double snapshot_dt = 0.01;
};

int cmd_variants(const RunConfig& cfg, const VariantFlags& vf, std::ostream& out) {
  if (!vf.seed) throw UsageError("--seed is required for variants");
  static const std::vector<std::string> kinds{"pmispf", "psimpf", "nonlinear_pmispf", "modified_psimpf",
                                              "datadriven"};
  if (std::find(kinds.begin(), kinds.end(), vf.which) == kinds.end()) {
    throw UsageError("--which must be one of pmispf, psimpf, nonlinear_pmispf, modified_psimpf, datadriven");
  }
  const Loaded l = load(cfg);
  const int n = l.basis.n();
  InitialDistribution dist;
  try {
    dist.kind = parse_distribution(vf.dist);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  if (dist.kind == DistributionKind::point) throw UsageError("point distribution is not available from the CLI");
  dist.radius = vf.radius;
  dist.guard = vf.guard;
  dist.seed = *vf.seed;
  dist.samples = vf.samples;

  std::vector<int> modes, states;
  if (vf.mode) {
    modes.push_back(check_index(vf.mode, n, "mode"));
  } else {
    for (int i = 0; i < n; ++i) modes.push_back(i);
  }
  if (vf.state) {
    states.push_back(check_index(vf.state, n, "state"));
  } else {
    for (int k = 0; k < n; ++k) states.push_back(k);
  }

  std::optional<NormalFormExpansion> expansion;
  if (vf.which == "nonlinear_pmispf" || vf.nonlinear_z) {
    ExpansionOptions o = expansion_options(cfg);
    o.order = std::max(o.order, 2);
    expansion = build_expansion(l.sys, l.basis, o);
  }
  std::optional<KoopmanBasis> koopman;
  json meta;
  if (vf.which == "datadriven") {
    InitialDistribution snap = dist;
    snap.samples = vf.members;
    snap.seed = *vf.seed ^ 0x5eedf00dULL;
    const SnapshotSet set = ensemble(l.sys, snap, vf.snapshot_dt, vf.steps);
    const KoopmanBasis fitted = fit_koopman(set);
    const double tol = 1e-3 * std::max(1.0, l.basis.eigenvalues.cwiseAbs().maxCoeff());
    koopman = reorder(fitted, match_modes(fitted, l.basis.eigenvalues, tol));
    meta = {{"snapshot_pairs", set.pairs()},
            {"members", set.members},
            {"diverged", set.diverged},
            {"holdout_rel_error", fitted.holdout_rel_error}};
  }

  json results = json::array();
  for (int i : modes) {
    for (int k : states) {
      Estimate e;
      if (vf.which == "pmispf") {
        e = pmispf(l.basis, dist, i, k);
      } else if (vf.which == "psimpf") {
        e = psimpf(l.basis, expansion ? &*expansion : nullptr, dist, i, k);
      } else if (vf.which == "nonlinear_pmispf") {
        e = nonlinear_pmispf(l.basis, *expansion, dist, i, k);
      } else if (vf.which == "modified_psimpf") {
        e = modified_psimpf(l.basis, expansion ? &*expansion : nullptr, dist, i, k);
      } else {
        e = datadriven_pf(*koopman, dist, i, k);
      }
      results.push_back(json::parse(estimate_json(e, vf.which, i, k)));
    }
  }
  json doc{{"which", vf.which},
           {"scheme", l.scheme_label},
           {"distribution", to_string(dist.kind)},
           {"samples", dist.samples},
           {"guard", dist.guard},
           {"seed", dist.seed},
           {"results", results}};
  if (!meta.is_null()) doc["snapshots"] = meta;
  emit(cfg, doc.dump(2) + "\n", out);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Participation factors of polynomial dynamical systems", "modalpf"};
  app.require_subcommand(1);

  RunConfig cfg;
  PFFlags pf;
  SweepFlags sw;
  TimeFlags tf;
  ReconstructFlags rf;
  VariantFlags vf;

  auto* eig = app.add_subcommand("eig", "Eigendecomposition and scaling factors");
  add_common(eig, cfg);
  add_scaling(eig, cfg);

  auto add_pf_flags = [&](CLI::App* cmd) {
    cmd->add_flag("--linear", pf.linear, "Linear PF matrix");
    cmd->add_option("--mode", pf.modes, "Linear mode (1-based); repeatable");
    cmd->add_option("--tuple", pf.tuples, "Combination mode r,s,...; repeatable")->allow_extra_args(false);
    cmd->add_option("--alpha", cfg.alpha, "Perturbation amplitude (one value or one per state)");
    cmd->add_option("--order", cfg.order, "Normal-form order N");
  };

  auto* pfc = app.add_subcommand("pf", "Linear and nonlinear participation factors");
  add_common(pfc, cfg);
  add_scaling(pfc, cfg);
  add_pf_flags(pfc);
  pfc->add_flag("--normalize", pf.normalize, "Divide by the largest-magnitude entry");
  pfc->add_flag("--phase", pf.phase, "Add a phase column");

  auto* sweep = app.add_subcommand("sweep", "PFs over a grid of theta scales or alpha values");
  add_common(sweep, cfg);
  add_scaling(sweep, cfg);
  add_pf_flags(sweep);
  sweep->add_option("--what", sw.what, "theta or alpha");
  sweep->add_option("--grid", sw.grid, "Comma-separated grid values");
  sweep->add_flag("--invariance", sw.invariance, "Run the refactorization invariance check");
  sweep->add_option("--refactorizations", sw.refactorizations, "Random (sigma, xi) factorizations");
  sweep->add_option("--seed", sw.seed, "Seed for the invariance check");

  auto add_time = [&](CLI::App* cmd) {
    cmd->add_option("--perturb", tf.perturb, "k=<state>,alpha=<amplitude>");
    cmd->add_option("--x0", tf.x0, "Full initial state, comma separated");
    cmd->add_option("--dt", tf.dt, "Time step");
    cmd->add_option("--T", tf.T, "Final time");
  };

  auto* simulate = app.add_subcommand("simulate", "RK4 integration");
  add_common(simulate, cfg);
  add_time(simulate);

  auto* recon = app.add_subcommand("reconstruct", "Closed-form normal-form response (scheme II by default)");
  add_common(recon, cfg);
  add_scaling(recon, cfg);
  add_time(recon);
  recon->add_option("--order", cfg.order, "Normal-form order N");
  recon->add_option("--mode", rf.mode, "Emit only this linear mode's component");
  recon->add_option("--tuple", rf.tuple, "Emit only this combination mode's component");
  recon->add_flag("--envelope", rf.envelope, "Emit |component| instead of the real signal");
  recon->add_option("--inversion", rf.inversion, "single or fixed-point");

  auto* variants = app.add_subcommand("variants", "Monte Carlo PF variants");
  add_common(variants, cfg);
  add_scaling(variants, cfg);
  variants->add_option("--which", vf.which, "pmispf|psimpf|nonlinear_pmispf|modified_psimpf|datadriven");
  variants->add_option("--seed", vf.seed, "Random seed (required)");
  variants->add_option("--samples", vf.samples, "Monte Carlo samples");
  variants->add_option("--dist", vf.dist, "uniform-sphere or componentwise-uniform");
  variants->add_option("--radius", vf.radius, "Distribution radius");
  variants->add_option("--guard", vf.guard, "Relative denominator guard");
  variants->add_option("--mode", vf.mode, "Mode (1-based); all when omitted");
  variants->add_option("--state", vf.state, "State (1-based); all when omitted");
  variants->add_option("--order", cfg.order, "Normal-form order for corrected z0");
  variants->add_flag("--nonlinear-z", vf.nonlinear_z, "Use normal-form corrected z0 in psimpf/modified_psimpf");
  variants->add_option("--snapshot-members", vf.members, "Ensemble members for datadriven");
  variants->add_option("--snapshot-steps", vf.steps, "Steps per member for datadriven");
  variants->add_option("--snapshot-dt", vf.snapshot_dt, "Snapshot interval for datadriven");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 3;
  }

  if (*recon && cfg.scheme.empty() && cfg.theta.empty()) cfg.scheme = "II";
  if (cfg.format.empty()) cfg.format = (*eig || *variants) ? "json" : "csv";
  try {
    if (*eig) return cmd_eig(cfg, out);
    if (*pfc) return cmd_pf(cfg, pf, out);
    if (*sweep) return cmd_sweep(cfg, pf, sw, out);
    if (*simulate) return cmd_simulate(cfg, tf, out);
    if (*recon) return cmd_reconstruct(cfg, tf, rf, out, err);
    if (*variants) return cmd_variants(cfg, vf, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 3;
  } catch (const DegeneracyError& e) {
    err << "degenerate: " << e.what() << '\n';
    return 2;
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 3;
}

}  // namespace modalpf::cli
