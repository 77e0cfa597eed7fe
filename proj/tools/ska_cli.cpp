// Experiment driver: builds Krylov bases with the different constructors,
// runs GMRES / sketched GMRES pairs, sweeps performance profiles, and
// evaluates the condition-growth bounds. All output is CSV with a leading
// comment line echoing the canonical configuration.

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ska/analysis.hpp"
#include "ska/arnoldi.hpp"
#include "ska/matrix_io.hpp"
#include "ska/selection.hpp"
#include "ska/solvers.hpp"

namespace {

using namespace ska;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct MethodSpec {
  std::string name;
  ArnoldiConfig cfg;
};

MethodSpec parse_method(const std::string& name, const ArnoldiConfig& base) {
  MethodSpec m{name, base};
  if (name == "full") {
    m.cfg.method = ArnoldiMethod::full;
  } else if (name == "truncated") {
    m.cfg.method = ArnoldiMethod::truncated;
  } else if (name == "truncated-sketched") {
    m.cfg.method = ArnoldiMethod::truncated_sketched;
  } else if (name == "sketched-orth") {
    m.cfg.method = ArnoldiMethod::sketched_orthonormal;
  } else if (name.rfind("ssa-", 0) == 0) {
    m.cfg.method = ArnoldiMethod::sketch_select;
    try {
      m.cfg.strategy = parse_strategy(name.substr(4));
    } catch (const std::invalid_argument&) {
      throw CLI::ValidationError("--methods", "unknown strategy '" + name + "'");
    }
  } else {
    throw CLI::ValidationError("--methods", "unknown method '" + name + "'");
  }
  return m;
}

/// Common problem / sketch / output options shared by the subcommands.
struct CommonOpts {
  std::string matrix_path;
  std::string generate_spec;
  std::string rhs = "gaussian";
  std::uint64_t seed = 0;
  Index m = 100;
  Index k = 2;
  Index s = 0;  // 0: auto 2(m+1)
  std::vector<std::string> methods;
  double cond_threshold = 1e12;
  Index cond_check_stride = 5;
  std::string out_path;
  bool ignore_cond = false;

  void attach(CLI::App* app, bool with_methods = true) {
    auto* grp = app->add_option_group("problem");
    grp->add_option("--matrix", matrix_path, "MatrixMarket file");
    grp->add_option("--generate", generate_spec,
                    "generator spec name:params, e.g. conv_diff_2d:64,50");
    grp->require_option(1);
    app->add_option("--rhs", rhs)
        ->check(CLI::IsMember({"gaussian", "e1", "e1pert", "ones"}));
    app->add_option("--seed", seed);
    app->add_option("--m", m);
    app->add_option("--k", k);
    app->add_option("--s", s, "sketch dimension (default 2(m+1))");
    if (with_methods) app->add_option("--strategy,--methods", methods)->delimiter(',');
    app->add_option("--cond-threshold", cond_threshold);
    app->add_option("--cond-check-stride", cond_check_stride);
    app->add_option("--out", out_path, "output CSV path (default stdout)");
    app->add_flag("--ignore-cond", ignore_cond,
                  "keep iterating past the condition threshold");
  }

  CsrMatrix load() const {
    if (!matrix_path.empty()) return read_matrix_market(matrix_path);
    return generate(generate_spec);
  }

  Index sketch_dim() const { return s > 0 ? s : 2 * (m + 1); }

  ArnoldiConfig base_cfg() const {
    ArnoldiConfig cfg;
    cfg.m_max = m;
    cfg.k = k;
    cfg.cond_threshold =
        ignore_cond ? std::numeric_limits<double>::infinity() : cond_threshold;
    cfg.cond_check_stride = cond_check_stride;
    return cfg;
  }

  std::string canonical(const std::string& cmd) const {
    std::ostringstream os;
    os << "# cmd=" << cmd;
    if (!matrix_path.empty()) os << " matrix=" << matrix_path;
    if (!generate_spec.empty()) os << " generate=" << generate_spec;
    os << " rhs=" << rhs << " seed=" << seed << " m=" << m << " k=" << k
       << " s=" << sketch_dim() << " cond-threshold=" << fmt(cond_threshold)
       << " cond-check-stride=" << cond_check_stride
       << " ignore-cond=" << (ignore_cond ? 1 : 0);
    if (!methods.empty()) {
      os << " methods=";
      for (std::size_t i = 0; i < methods.size(); ++i)
        os << (i ? "," : "") << methods[i];
    }
    return os.str();
  }
};

class CsvOut {
 public:
  explicit CsvOut(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

int cmd_build_basis(const CommonOpts& opts) {
  CsrMatrix a = opts.load();
  Vector b = make_rhs(parse_rhs(opts.rhs), a.nrows, opts.seed);
  auto methods = opts.methods;
  if (methods.empty()) methods = {"full"};
  SketchOperator sketch =
      SketchOperator::srht(a.nrows, std::min<Index>(opts.sketch_dim(), a.nrows ? a.nrows : 1), opts.seed);
  CsvOut out(opts.out_path);
  out.stream() << opts.canonical("build-basis") << "\n";
  out.stream() << "method,j,cond,sigma_min,sigma_max,stopped_reason\n";
  for (const auto& name : methods) {
    MethodSpec spec = parse_method(name, opts.base_cfg());
    ArnoldiProcess proc(a, b, spec.cfg,
                        spec.cfg.method == ArnoldiMethod::full ||
                                spec.cfg.method == ArnoldiMethod::truncated
                            ? nullptr
                            : &sketch);
    while (true) {
      const Index prev = proc.iters();
      proc.step();
      if (proc.iters() == prev) break;
      Vector sv = singular_values(proc.basis());
      double smin = sv[sv.size() - 1];
      double smax = sv[0];
      double cond = smin == 0.0 ? std::numeric_limits<double>::infinity()
                                : smax / smin;
      out.stream() << name << "," << proc.iters() << "," << fmt(cond) << ","
                   << fmt(smin) << "," << fmt(smax) << ","
                   << to_string(proc.stop_reason()) << "\n";
      if (proc.stopped()) break;
    }
  }
  return 0;
}

int cmd_sgmres(const CommonOpts& opts, double tol, Index true_resid_stride) {
  CsrMatrix a = opts.load();
  Vector b = make_rhs(parse_rhs(opts.rhs), a.nrows, opts.seed);
  auto methods = opts.methods;
  if (methods.empty()) methods = {"truncated", "ssa-pinv"};
  SketchOperator sketch =
      SketchOperator::srht(a.nrows, std::min<Index>(opts.sketch_dim(), a.nrows), opts.seed);
  CsvOut out(opts.out_path);
  out.stream() << opts.canonical("sgmres") << " tol=" << fmt(tol)
               << " true-resid-stride=" << true_resid_stride << "\n";
  out.stream() << "method,j,sketched_resid,true_resid,cond\n";
  // Reference GMRES first; its residual estimate is exact for the
  // orthonormal basis, reported in the true_resid column.
  SolveReport ref = gmres(a, b, opts.m, tol);
  for (std::size_t i = 0; i < ref.iter.size(); ++i)
    out.stream() << "gmres," << ref.iter[i] << ",,"
                 << fmt(ref.resid_estimate[i]) << ",\n";
  for (const auto& name : methods) {
    MethodSpec spec = parse_method(name, opts.base_cfg());
    SolveReport rep =
        sgmres(a, b, spec.cfg, sketch, tol, true_resid_stride, opts.ignore_cond);
    std::size_t ci = 0;
    for (std::size_t i = 0; i < rep.iter.size(); ++i) {
      std::string tr, cond;
      if (ci < rep.checkpoint_iter.size() &&
          rep.checkpoint_iter[ci] == rep.iter[i]) {
        tr = fmt(rep.true_resid[ci]);
        cond = fmt(rep.basis_cond[ci]);
        ++ci;
      }
      out.stream() << "sgmres-" << name << "," << rep.iter[i] << ","
                   << fmt(rep.sketched_resid[i]) << "," << tr << "," << cond
                   << "\n";
    }
  }
  return 0;
}

int cmd_perf_profile(const std::vector<std::string>& problems,
                     const CommonOpts& opts) {
  auto methods = opts.methods;
  if (methods.empty())
    methods = {"truncated", "ssa-pinv", "ssa-omp", "ssa-sp", "ssa-greedy"};
  Matrix metric(static_cast<Index>(methods.size()),
                static_cast<Index>(problems.size()));
  for (std::size_t p = 0; p < problems.size(); ++p) {
    CsrMatrix a = problems[p].find(':') != std::string::npos ||
                          problems[p].find('.') == std::string::npos
                      ? generate(problems[p])
                      : read_matrix_market(problems[p]);
    Vector b = make_rhs(parse_rhs(opts.rhs), a.nrows, opts.seed);
    SketchOperator sketch = SketchOperator::srht(
        a.nrows, std::min<Index>(opts.sketch_dim(), a.nrows), opts.seed);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      MethodSpec spec = parse_method(methods[m], opts.base_cfg());
      const SketchOperator* sk =
          spec.cfg.method == ArnoldiMethod::full ||
                  spec.cfg.method == ArnoldiMethod::truncated
              ? nullptr
              : &sketch;
      ArnoldiResult res = arnoldi_run(a, b, spec.cfg, sk);
      // Metric: largest basis dimension reached with cond below threshold.
      metric(static_cast<Index>(m), static_cast<Index>(p)) =
          static_cast<double>(res.iters);
    }
  }
  ProfileData prof = performance_profile(methods, metric);
  CsvOut out(opts.out_path);
  out.stream() << opts.canonical("perf-profile") << " problems=";
  for (std::size_t i = 0; i < problems.size(); ++i)
    out.stream() << (i ? ";" : "") << problems[i];
  out.stream() << "\n";
  out.stream() << "method,theta,y\n";
  for (std::size_t m = 0; m < prof.methods.size(); ++m)
    for (const auto& [theta, y] : prof.curves[m])
      out.stream() << prof.methods[m] << "," << fmt(theta) << "," << fmt(y)
                   << "\n";
  return 0;
}

int cmd_bounds_demo(Index trials, Index nrows, Index ncols, std::uint64_t seed,
                    Index recurrence_steps, const std::string& out_path) {
  CsvOut out(out_path);
  out.stream() << "# cmd=bounds-demo trials=" << trials << " n=" << nrows
               << " m=" << ncols << " seed=" << seed
               << " recurrence-steps=" << recurrence_steps << "\n";
  out.stream() << "kind,index,sigma_min,sigma_max,alpha,eta,"
                  "lower_sigma_min_sq,upper_cond_sq,attainable_cond_sq,"
                  "measured_cond_sq\n";
  CounterRng rng(seed);
  for (Index t = 0; t < trials; ++t) {
    Matrix v(nrows, ncols);
    for (Index j = 0; j < ncols; ++j) {
      for (Index i = 0; i < nrows; ++i) v(i, j) = rng.next_gaussian();
      v.col(j).normalize();
    }
    Vector s = singular_values(v);
    double smin = s[s.size() - 1];
    double alpha = 0.5 * smin;
    Vector vnew = adversarial_next_vector(v, alpha);
    BoundReport rep = evaluate_bounds(v, vnew);
    out.stream() << "trial," << t << "," << fmt(rep.sigma_min_v) << ","
                 << fmt(rep.sigma_max_v) << "," << fmt(rep.alpha) << ","
                 << fmt(rep.eta) << "," << fmt(rep.lower_bound_sigma_min_sq)
                 << "," << fmt(rep.upper_bound_cond_sq) << ","
                 << fmt(rep.attainable_lower_cond_sq) << ","
                 << fmt(rep.measured_cond_sq) << "\n";
  }
  auto series = decay_recurrence(1.0 / std::sqrt(2.0), 0, recurrence_steps,
                                 [](double x) { return 0.5 * x; });
  for (std::size_t i = 0; i < series.size(); ++i)
    out.stream() << "recurrence," << i << "," << fmt(series[i])
                 << ",,,,,,,\n";
  return 0;
}

int cmd_select_demo(const std::string& out_path) {
  Matrix v(4, 3);
  v << 1, 0, 0, 2, 2, 0, 0, 1, 1, 0, 0, 2;
  v /= std::sqrt(5.0);
  Vector w1(4), w2(4);
  w1 << 8, 8, 9, 7;
  w2 << 9, 9, 10, 10;
  CsvOut out(out_path);
  out.stream() << "# cmd=select-demo\n";
  out.stream() << "kind,name,a,b,c,d\n";
  for (auto strat :
       {SelectStrategy::pinv, SelectStrategy::pinv2, SelectStrategy::corr,
        SelectStrategy::corr_pinv, SelectStrategy::omp, SelectStrategy::sp,
        SelectStrategy::greedy, SelectStrategy::bruteforce}) {
    SelectionResult res = select(strat, v, w1, 1);
    out.stream() << "selection," << to_string(strat) << ","
                 << res.indices[0] + 1 << "," << fmt(res.coeffs[0]) << ",,\n";
  }
  for (Index i = 0; i < 3; ++i) {
    auto [cu, cn] = cond_after_projection(v, w1, i);
    out.stream() << "cond-after-projection,i" << i + 1 << "," << fmt(cu) << ","
                 << fmt(cn) << ",,\n";
  }
  for (Index i = 0; i < 3; ++i) {
    Vector vi = v.col(i);
    Vector what = w2 - vi * vi.dot(w2);
    Matrix g(4, 4);
    g << v, what / what.norm();
    auto m = orthogonality_metrics(g);
    out.stream() << "orth-loss,i" << i + 1 << "," << fmt(m[0]) << ","
                 << fmt(m[1]) << "," << fmt(m[2]) << "," << fmt(m[3]) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sketch-and-select Arnoldi experiment driver"};
  app.require_subcommand(1);
  app.set_config("--config");

  CommonOpts basis_opts, sg_opts;
  double tol = 1e-8;
  Index true_resid_stride = 10;

  auto* build = app.add_subcommand("build-basis",
                                   "basis condition growth per method");
  basis_opts.attach(build);

  auto* sg = app.add_subcommand("sgmres", "paired GMRES / sGMRES runs");
  sg_opts.attach(sg);
  sg->add_option("--tol", tol, "sketched residual tolerance");
  sg->add_option("--true-resid-stride", true_resid_stride);

  CommonOpts prof_opts;
  std::vector<std::string> problems;
  auto* prof = app.add_subcommand("perf-profile",
                                  "basis-dimension performance profile");
  // ';'-separated because generator specs already use ','.
  prof->add_option("--problems", problems, "generator specs or .mtx paths")
      ->delimiter(';')
      ->required();
  prof->add_option("--methods", prof_opts.methods)->delimiter(',');
  prof->add_option("--rhs", prof_opts.rhs)
      ->check(CLI::IsMember({"gaussian", "e1", "e1pert", "ones"}));
  prof->add_option("--seed", prof_opts.seed);
  prof->add_option("--m", prof_opts.m);
  prof->add_option("--k", prof_opts.k);
  prof->add_option("--s", prof_opts.s);
  prof->add_option("--cond-threshold", prof_opts.cond_threshold);
  prof->add_option("--cond-check-stride", prof_opts.cond_check_stride);
  prof->add_option("--out", prof_opts.out_path);

  Index trials = 100, bn = 40, bm = 8, rec_steps = 200;
  std::uint64_t bseed = 0;
  std::string bout;
  auto* bounds = app.add_subcommand("bounds-demo",
                                    "condition-growth bound evaluation");
  bounds->add_option("--trials", trials);
  bounds->add_option("--n", bn);
  bounds->add_option("--m", bm);
  bounds->add_option("--seed", bseed);
  bounds->add_option("--recurrence-steps", rec_steps);
  bounds->add_option("--out", bout);

  std::string sout;
  auto* sel = app.add_subcommand("select-demo",
                                 "subset-selection counterexample fixtures");
  sel->add_option("--out", sout);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) return cmd_build_basis(basis_opts);
    if (sg->parsed()) return cmd_sgmres(sg_opts, tol, true_resid_stride);
    if (prof->parsed()) return cmd_perf_profile(problems, prof_opts);
    if (bounds->parsed())
      return cmd_bounds_demo(trials, bn, bm, bseed, rec_steps, bout);
    if (sel->parsed()) return cmd_select_demo(sout);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
