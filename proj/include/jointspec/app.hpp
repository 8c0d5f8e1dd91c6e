#pragma once

// Command pipelines behind the jointspec CLI. Each command reads one JSON
// input, writes report.json (and cloud.csv / plot.svg where a cloud exists)
// under the output directory, and maps its outcome to an exit status.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "jointspec/bcl_model.hpp"
#include "jointspec/cayley_hamilton.hpp"
#include "jointspec/cloud_io.hpp"
#include "jointspec/generators.hpp"
#include "jointspec/grid.hpp"
#include "jointspec/ideal_support.hpp"
#include "jointspec/json_io.hpp"
#include "jointspec/matrix_core.hpp"
#include "jointspec/mpoly.hpp"
#include "jointspec/random.hpp"
#include "jointspec/rational_symbols.hpp"
#include "jointspec/symbol_families.hpp"
#include "jointspec/tuple_spectrum.hpp"

namespace jointspec {

enum class Command { JointSpectrum, Annihilate, KoszulCheck, BclVariety, PairXi, ToeplitzUnion, SupportCheck, VerifyAll };

inline const std::vector<std::pair<std::string, Command>>& command_names() {
  static const std::vector<std::pair<std::string, Command>> names{
      {"joint-spectrum", Command::JointSpectrum}, {"annihilate", Command::Annihilate},
      {"koszul-check", Command::KoszulCheck},     {"bcl-variety", Command::BclVariety},
      {"pair-xi", Command::PairXi},               {"toeplitz-union", Command::ToeplitzUnion},
      {"support-check", Command::SupportCheck},   {"verify-all", Command::VerifyAll}};
  return names;
}

inline std::string to_string(Command c) {
  for (const auto& [name, cmd] : command_names())
    if (cmd == c) return name;
  return "unknown";
}

inline std::optional<Command> parse_command(const std::string& s) {
  for (const auto& [name, cmd] : command_names())
    if (name == s) return cmd;
  return std::nullopt;
}

/// Named tolerances with their defaults; --tol.<name>=<value> overrides one.
inline const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tols{
      {"tri", defaults::tri_tol},   // simultaneous triangularization residual
      {"annihilation", 1e-6},       // ||p_a(T)||_F relative to (1 + max ||A_j||_F)^N
      {"variety", 1e-6},            // zero-set ratio cut
      {"delta", 0.05},              // probes this close to the spectrum are skipped
      {"koszul", 1e-8},             // Koszul rank cut
      {"product", 1e-10},           // BCL product law on the grid
      {"point_product", 1e-8},      // |lambda_1 ... lambda_d - z| per cloud point
      {"boundary", 1e-6},           // distinguished-variety boundary band
      {"purity_margin", 1e-4},      // numerical radius band below 1
      {"gcd", 1e-8},                // approximate gcd rank cut
      {"xi", 1e-6},                 // |xi(lambda)| / scale on the cloud
      {"pa", 1e-7},                 // symbol-level p_a residual
      {"nilpotency", 1e-8},         // ||xi(phi(z))^r|| cut
      {"support", 1e-9},            // support membership ratio
      {"spectrum", 1e-6},           // distance counted as a joint eigenvalue
  };
  return tols;
}

struct RunConfig {
  Command command = Command::VerifyAll;
  std::string input_path;
  std::string output_dir = "out";
  std::optional<std::size_t> grid_radii;
  std::optional<std::size_t> grid_angles;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;  // overrides
  bool svg = true;
};

enum class Status { Pass, Fail, Inconclusive, Error, InputError };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
    case Status::Error: return "error";
    default: return "input_error";
  }
}

inline int exit_code(Status s) {
  switch (s) {
    case Status::Pass: return 0;
    case Status::InputError: return 2;
    default: return 1;
  }
}

/// Worst of two statuses: input errors, then errors, failures and inconclusive results dominate passes.
inline Status combine(Status a, Status b) {
  auto rank = [](Status s) {
    switch (s) {
      case Status::Pass: return 0;
      case Status::Inconclusive: return 1;
      case Status::Fail: return 2;
      case Status::Error: return 3;
      default: return 4;
    }
  };
  return rank(a) >= rank(b) ? a : b;
}

struct RunResult {
  Status status = Status::Pass;
  Json report;
};

namespace app_detail {

struct Context {
  std::map<std::string, double> tol;
  std::optional<std::size_t> radii, angles;
  std::uint64_t seed = 0;
  bool svg = true;
  std::filesystem::path out;

  double t(const std::string& name) const { return tol.at(name); }

  PolarGrid grid(PolarGrid fallback) const {
    if (radii) fallback.radii = *radii;
    if (angles) fallback.angles = *angles;
    fallback.validate();
    return fallback;
  }

  Json grid_json(const PolarGrid& g) const { return Json{{"radii", g.radii}, {"angles", g.angles}}; }

  void write_cloud(const Cloud& c) const {
    write_cloud_csv(c, (out / "cloud.csv").string());
    if (svg) write_cloud_svg(c, (out / "plot.svg").string());
  }
};

inline Status pass_if(bool ok) { return ok ? Status::Pass : Status::Fail; }

inline std::vector<CPoint> probes_or_random(const Json& in, std::size_t d, Rng& rng, std::size_t count,
                                            double radius) {
  if (in.is_object() && in.contains("probes")) return points_from_json(in["probes"], "/probes", d);
  std::vector<CPoint> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_in_polydisk(rng, static_cast<Eigen::Index>(d), radius));
  return out;
}

inline AlphaSet alphas_or_moment(const Json& in, std::size_t d, std::size_t n) {
  if (!in.is_object() || !in.contains("alphas")) return moment_curve_alphas(d, n);
  AlphaSet s{d, points_from_json(in["alphas"], "/alphas", d)};
  if (s.vectors.empty()) throw SchemaError("/alphas", "expected at least one vector");
  return s;
}

inline Json doubles(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(json_detail::num(x));
  return out;
}

inline RunResult joint_spectrum(const Json& in, const Context& ctx) {
  const CommutingTuple t = tuple_from_json(in, "");
  TriangularizeOptions opt;
  opt.seed = ctx.seed;
  opt.tol_tri = ctx.t("tri");
  const JointSpectrum spec = joint_eigenvalues(t, opt);
  Json pts = Json::array();
  for (const auto& p : spec.points) pts.push_back(to_json(p));
  RunResult r;
  r.status = pass_if(spec.residual <= ctx.t("tri"));
  r.report = {{"points", std::move(pts)},
              {"residual", json_detail::num(spec.residual)},
              {"point_residuals", doubles(spec.point_residuals)},
              {"commutator_residual", json_detail::num(t.comm_residual())}};
  return r;
}

inline RunResult annihilate(const Json& in, const Context& ctx) {
  const CommutingTuple t = tuple_from_json(in, "");
  Rng rng(ctx.seed);
  const AlphaSet alphas = alphas_or_moment(in, t.d(), t.n());
  const AnnihilatorFamily fam = build_annihilators(t, alphas);
  const double threshold = annihilation_threshold(t, ctx.t("annihilation"));
  const auto probes = probes_or_random(in, t.d(), rng, 100, 2.0);
  TriangularizeOptions tri;
  tri.seed = ctx.seed;
  tri.tol_tri = ctx.t("tri");
  const VarietyReport v = spectrum_as_variety_check(t, fam, probes, ctx.t("variety"), ctx.t("delta"), tri);
  Json violations = Json::array();
  for (const auto& x : v.violations) {
    violations.push_back({{"kind", to_string(x.kind)}, {"point", to_json(x.point)}, {"ratio", json_detail::num(x.ratio)}});
  }
  Json polys = Json::array();
  for (const auto& p : fam.polys) polys.push_back(to_json(p.pruned(1e-15)));
  RunResult r;
  r.status = pass_if(fam.max_residual <= threshold && v.zero_set_pass);
  r.report = {{"max_residual", json_detail::num(fam.max_residual)},
              {"threshold", json_detail::num(threshold)},
              {"residuals", doubles(fam.residuals)},
              {"zero_set_pass", v.zero_set_pass},
              {"max_eigen_ratio", json_detail::num(v.max_eigen_ratio)},
              {"min_probe_ratio", json_detail::num(v.min_probe_ratio)},
              {"probes_tested", v.probes_tested},
              {"probes_filtered", v.probes_filtered},
              {"violations", std::move(violations)},
              {"alpha_count", alphas.count()},
              {"polynomials", std::move(polys)}};
  return r;
}

inline RunResult koszul_check(const Json& in, const Context& ctx) {
  const CommutingTuple t = tuple_from_json(in, "");
  Rng rng(ctx.seed);
  TriangularizeOptions tri;
  tri.seed = ctx.seed;
  tri.tol_tri = ctx.t("tri");
  const JointSpectrum spec = joint_eigenvalues(t, tri);
  const auto probes = probes_or_random(in, t.d(), rng, 50, 2.0);
  std::vector<std::pair<CPoint, bool>> pts;
  for (const auto& p : spec.points) pts.emplace_back(p, true);
  for (const auto& p : probes) pts.emplace_back(p, distance_to_spectrum(spec, p) <= ctx.t("spectrum"));
  Json rows = Json::array();
  std::size_t agree = 0, disagree = 0, band = 0;
  for (const auto& [x, member] : pts) {
    Json row{{"point", to_json(x)}, {"joint_eigenvalue", member}};
    try {
      const KoszulVerdict v = koszul_verdict(t, x, ctx.t("koszul"));
      row["taylor_singular"] = v.singular;
      row["rank"] = v.rank;
      row["dim"] = v.dim;
      (v.singular == member ? agree : disagree) += 1;
    } catch (const InconclusiveError&) {
      row["taylor_singular"] = "inconclusive";
      ++band;
    }
    rows.push_back(std::move(row));
  }
  RunResult r;
  r.status = disagree > 0 ? Status::Fail : band > 0 ? Status::Inconclusive : Status::Pass;
  r.report = {{"agreements", agree}, {"disagreements", disagree}, {"inconclusive", band}, {"points", std::move(rows)}};
  return r;
}

inline RunResult bcl_variety(const Json& in, const Context& ctx) {
  const BCLData b = bcl_from_json(in, "");
  const PolarGrid grid = ctx.grid(PolarGrid{});
  const VarietySample s = sample_variety(b, grid);
  const auto [comm, prod] = b.validation_residuals(grid);
  PurityOptions popt;
  popt.margin = ctx.t("purity_margin");
  Json purity = Json::array();
  bool all_pure = true, purity_inconclusive = false;
  for (std::size_t j = 0; j < b.d(); ++j) {
    const PurityResult p = purity_check(b, j, popt);
    purity.push_back({{"verdict", to_string(p.verdict)}, {"nu", json_detail::num(p.nu)},
                      {"power_norm", json_detail::num(p.power_norm)}});
    all_pure = all_pure && p.pure();
    purity_inconclusive = purity_inconclusive || p.verdict == PurityResult::Verdict::Inconclusive;
  }
  const DistinguishedResult dist = distinguished_check(s, ctx.t("boundary"));
  Json witnesses = Json::array();
  for (const auto& w : dist.witnesses) witnesses.push_back({{"z", to_json(w.z)}, {"lambda", to_json(w.lambda)}});
  const bool product_ok = prod <= ctx.t("product") && s.max_product_residual() <= ctx.t("point_product");
  const bool agree = dist.is_distinguished == all_pure;
  ctx.write_cloud(to_cloud(s));
  RunResult r;
  r.status = !product_ok ? Status::Fail : purity_inconclusive ? Status::Inconclusive : pass_if(agree);
  r.report = {{"grid", ctx.grid_json(grid)},
              {"points", s.points.size()},
              {"skipped", s.skipped.size()},
              {"product_residual", json_detail::num(prod)},
              {"commutator_residual", json_detail::num(comm)},
              {"max_point_product_residual", json_detail::num(s.max_product_residual())},
              {"max_point_residual", json_detail::num(s.max_residual())},
              {"purity", std::move(purity)},
              {"jointly_pure", all_pure},
              {"distinguished", dist.is_distinguished},
              {"meets_open_polydisk", dist.meets_open_polydisk},
              {"boundary_witnesses", std::move(witnesses)},
              {"distinguished_iff_pure", agree}};
  return r;
}

inline RunResult pair_xi(const Json& in, const Context& ctx) {
  const BCLData b = bcl_from_json(in, "");
  if (b.d() != 2) throw SchemaError("/d", "pair-xi needs d = 2");
  XiRoute route = XiRoute::Auto;
  if (in.contains("route")) {
    const std::string v = in["route"].is_string() ? in["route"].get<std::string>() : "";
    if (v == "gcd") route = XiRoute::Gcd;
    else if (v != "auto") throw SchemaError("/route", "expected \"auto\" or \"gcd\"");
  }
  const PairPolys pp = pair_defining_polys(b, route, ctx.t("gcd"));
  const PolarGrid grid = ctx.grid(PolarGrid{});
  const VarietySample s = sample_variety(b, grid);
  const double ratio = xi_vanishing_ratio(pp.xi, s);
  ctx.write_cloud(to_cloud(s));
  RunResult r;
  r.status = pass_if(ratio <= ctx.t("xi"));
  r.report = {{"grid", ctx.grid_json(grid)},
              {"p1", to_json(pp.p1.pruned(1e-14))},
              {"p2", to_json(pp.p2.pruned(1e-14))},
              {"xi", to_json(pp.xi.pruned(1e-14))},
              {"explicit_formula", pp.explicit_formula},
              {"gcd_residual", json_detail::num(pp.gcd_residual)},
              {"xi_vanishing_ratio", json_detail::num(ratio)},
              {"points", s.points.size()}};
  return r;
}

inline RunResult toeplitz_union(const Json& in, const Context& ctx) {
  const SymbolFamily fam = symbol_family_from_json(in, "");
  const PolarGrid grid = ctx.grid(default_symbol_grid());
  const UnionSample s = spectrum_union_sample(fam, grid);
  const AlphaSet alphas = alphas_or_moment(in, fam.k(), fam.n());
  const SymbolPaReport pa = symbol_level_pa_check(fam, alphas, grid);
  bool ok = pa.worst <= ctx.t("pa");
  double max_abs = 0.0;
  for (const auto& p : s.points)
    for (Eigen::Index j = 0; j < p.lambda.size(); ++j) max_abs = std::max(max_abs, std::abs(p.lambda(j)));
  RunResult r;
  r.report = {{"grid", ctx.grid_json(grid)},
              {"points", s.points.size()},
              {"skipped", s.skipped.size()},
              {"commutativity_residual", json_detail::num(fam.commutativity_residual())},
              {"max_abs_lambda", json_detail::num(max_abs)},
              {"pa_max_ratio", doubles(pa.max_ratio)},
              {"pa_worst", json_detail::num(pa.worst)},
              {"pa_worst_z", to_json(pa.worst_z)},
              {"pa_worst_alpha", pa.worst_alpha}};
  if (in.contains("xi")) {
    const MPoly xi = poly_from_json(in["xi"], "/xi");
    if (xi.nvars() != fam.k()) throw SchemaError("/xi/nvars", "expected one variable per symbol");
    const NilpotencyReport nil = nilpotency_annihilation_check(fam, xi, grid, ctx.t("nilpotency"));
    Json w = Json::array();
    for (const auto& z : nil.witnesses) w.push_back(to_json(z));
    r.report["nilpotency"] = {{"passes", nil.passes},
                              {"r_used", nil.r_used},
                              {"n", fam.n()},
                              {"max_spectral_radius", json_detail::num(nil.max_spectral_radius)},
                              {"witnesses", std::move(w)}};
    ok = ok && nil.passes && nil.r_used <= fam.n();
  }
  ctx.write_cloud(to_cloud(s));
  r.status = pass_if(ok);
  return r;
}

inline RunResult support_check(const Json& in, const Context& ctx) {
  RunResult r;
  r.status = Status::Pass;
  if (in.contains("ideal")) {
    const PolyIdeal ideal = ideal_from_json(in["ideal"], "/ideal");
    if (!in.contains("probes")) throw SchemaError("/probes", "missing field");
    const auto probes = points_from_json(in["probes"], "/probes", ideal.nvars());
    Json rows = Json::array();
    Json member = Json::array();
    std::size_t band = 0;
    for (const auto& p : probes) {
      const Tri v = support_verdict(ideal, p, ctx.t("support"));
      band += v == Tri::Inconclusive;
      member.push_back(support_membership(ideal, p, ctx.t("support")));
      rows.push_back({{"point", to_json(p)}, {"verdict", to_string(v)},
                      {"ratio", json_detail::num(support_ratio(ideal, p))}});
    }
    r.report["membership"] = std::move(member);
    r.report["points"] = std::move(rows);
    r.report["inconclusive"] = band;
    if (in.contains("expected")) {
      const Json& e = in["expected"];
      if (!e.is_array() || e.size() != probes.size()) throw SchemaError("/expected", "expected one boolean per probe");
      bool match = true;
      for (std::size_t i = 0; i < probes.size(); ++i) {
        if (!e[i].is_boolean()) throw SchemaError("/expected/" + std::to_string(i), "expected a boolean");
        match = match && e[i].get<bool>() == r.report["membership"][i].get<bool>();
      }
      r.report["matches_expected"] = match;
      r.status = combine(r.status, pass_if(match));
    }
    if (band > 0) r.status = combine(r.status, Status::Inconclusive);
  }
  if (in.contains("tuple")) {
    const CommutingTuple t = tuple_from_json(in["tuple"], "/tuple");
    Rng rng(ctx.seed);
    const auto fam = build_annihilators(t, moment_curve_alphas(t.d(), t.n()));
    std::vector<CPoint> probes;
    if (in.contains("tuple_probes")) {
      probes = points_from_json(in["tuple_probes"], "/tuple_probes", t.d());
    } else {
      for (int i = 0; i < 50; ++i) probes.push_back(random_in_polydisk(rng, static_cast<Eigen::Index>(t.d()), 1.0));
    }
    SupportIdentityOptions opt;
    opt.support_tol = ctx.t("support");
    opt.koszul_tol = ctx.t("koszul");
    opt.spectrum_tol = ctx.t("spectrum");
    const SupportIdentityReport rep = support_spectrum_identity_check(t, fam, probes, opt);
    Json dis = Json::array();
    for (const auto& p : rep.disagreements) {
      dis.push_back({{"point", to_json(p.lambda)}, {"in_spectrum", p.in_spectrum},
                     {"in_support", to_string(p.in_support)}, {"taylor_singular", to_string(p.taylor_singular)}});
    }
    r.report["identity"] = {{"points", rep.points.size()},
                            {"outside_polydisk", rep.outside_polydisk},
                            {"agreements", rep.agreements},
                            {"inconclusive", rep.inconclusive},
                            {"disagreements", std::move(dis)},
                            {"pass", rep.pass}};
    r.status = combine(r.status, pass_if(rep.pass));
    if (rep.inconclusive > 0) r.status = combine(r.status, Status::Inconclusive);
  }
  if (!in.contains("ideal") && !in.contains("tuple")) throw SchemaError("", "expected \"ideal\" and/or \"tuple\"");
  return r;
}

struct Suite {
  Status status = Status::Pass;
  Json metrics = Json::object();

  void check(const std::string& name, bool ok, double value) {
    metrics[name] = {{"ok", ok}, {"value", json_detail::num(value)}};
    if (!ok) status = combine(status, Status::Fail);
  }
};

inline Suite suite_matrix_core(Rng& rng) {
  Suite s;
  double schur_res = 0.0, radius_gap = 0.0;
  for (int i = 0; i < 5; ++i) {
    const CMatrix a = random_gaussian_matrix(4 + i, rng);
    const SchurForm f = schur(a);
    schur_res = std::max(schur_res, (f.q * f.t * f.q.adjoint() - a).norm() / a.norm());
    const double nu = numerical_radius(a), rho = spectral_radius(a), nrm = norm2(a);
    radius_gap = std::max({radius_gap, rho - nu, nu - nrm, nrm - 2.0 * nu});
  }
  s.check("schur_residual", schur_res <= 1e-12, schur_res);
  s.check("radius_sandwich_violation", radius_gap <= 1e-8, radius_gap);
  return s;
}

inline Suite suite_mpoly(Rng& rng) {
  Suite s;
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    PolyMatrix m(3, 2);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) {
        MPoly p(2);
        p.add_term({0, 0}, random_gaussian(rng));
        p.add_term({1, 0}, random_gaussian(rng));
        p.add_term({0, 1}, random_gaussian(rng));
        m.set(r, c, std::move(p));
      }
    const MPoly d = det_poly_matrix(m);
    for (int k = 0; k < 5; ++k) {
      const CPoint x = random_in_polydisk(rng, 2, 1.5);
      const Complex direct = det(m.eval(x));
      worst = std::max(worst, std::abs(d(x) - direct) / std::max(1.0, std::abs(direct)));
    }
  }
  s.check("det_interpolation_error", worst <= 1e-10, worst);
  return s;
}

inline Suite suite_spectrum(Rng& rng, std::uint64_t seed) {
  Suite s;
  double res = 0.0;
  std::size_t disagree = 0, band = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const CommutingTuple t = random_poly_tuple(rng, 3 + trial % 3, 2 + static_cast<std::size_t>(trial % 2));
    TriangularizeOptions opt;
    opt.seed = seed;
    const JointSpectrum spec = joint_eigenvalues(t, opt);
    for (double r : spec.point_residuals) res = std::max(res, r / (1.0 + t.max_frobenius()));
    std::vector<CPoint> pts = spec.points;
    for (int k = 0; k < 10; ++k) pts.push_back(random_in_polydisk(rng, static_cast<Eigen::Index>(t.d()), 2.0));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      try {
        const bool member = i < spec.points.size() || distance_to_spectrum(spec, pts[i]) <= 1e-6;
        disagree += taylor_singular_at(t, pts[i]) != member;
      } catch (const InconclusiveError&) {
        ++band;
      }
    }
  }
  s.check("max_point_residual", res <= 1e-8, res);
  s.check("koszul_disagreements", disagree == 0, static_cast<double>(disagree));
  s.metrics["koszul_inconclusive"] = band;
  return s;
}

inline Suite suite_cayley_hamilton(Rng& rng) {
  Suite s;
  double worst = 0.0;
  std::size_t violations = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const CommutingTuple t = random_poly_tuple(rng, 2 + trial % 3, 2 + static_cast<std::size_t>(trial % 2));
    const AnnihilatorFamily fam = build_annihilators(t, moment_curve_alphas(t.d(), t.n()));
    worst = std::max(worst, fam.max_residual / annihilation_threshold(t));
    std::vector<CPoint> probes;
    for (int k = 0; k < 20; ++k) probes.push_back(random_in_polydisk(rng, static_cast<Eigen::Index>(t.d()), 2.0));
    violations += spectrum_as_variety_check(t, fam, probes).violations.size();
  }
  s.check("annihilation_over_threshold", worst <= 1.0, worst);
  s.check("zero_set_violations", violations == 0, static_cast<double>(violations));
  return s;
}

inline Suite suite_bcl(Rng& rng) {
  Suite s;
  double prod = 0.0, point_prod = 0.0;
  std::size_t disagree = 0;
  const PolarGrid grid{16, 32};
  for (int trial = 0; trial < 4; ++trial) {
    const Eigen::Index n = 2 + trial;
    std::uniform_int_distribution<Eigen::Index> rank(1, n - 1);
    const BCLData b = bcl_pair_from(random_projection(n, rank(rng), rng), random_unitary(n, rng));
    prod = std::max(prod, b.validation_residuals(grid).second);
    const VarietySample v = sample_variety(b, grid);
    point_prod = std::max(point_prod, v.max_product_residual());
    const bool pure = purity_check(b, 0).pure() && purity_check(b, 1).pure();
    disagree += distinguished_check(v).is_distinguished != pure;
  }
  s.check("product_residual", prod <= 1e-10, prod);
  s.check("point_product_residual", point_prod <= 1e-8, point_prod);
  s.check("distinguished_purity_disagreements", disagree == 0, static_cast<double>(disagree));
  return s;
}

inline Suite suite_symbols(Rng& rng) {
  Suite s;
  double pa = 0.0;
  std::size_t r_max_excess = 0;
  bool nil_ok = true;
  const PolarGrid grid{8, 16};
  for (int trial = 0; trial < 3; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial);
    const SymbolFamilyCase c = random_contractive_family(rng, n);
    pa = std::max(pa, symbol_level_pa_check(c.family, moment_curve_alphas(2, n), grid).worst);
    const NilpotencyReport nil = nilpotency_annihilation_check(c.family, c.xi, grid);
    nil_ok = nil_ok && nil.passes;
    r_max_excess += nil.r_used > n;
  }
  const SymbolFamilyCase j = jordan_symbol_family();
  const NilpotencyReport jn = nilpotency_annihilation_check(j.family, j.xi, grid);
  s.check("pa_worst", pa <= 1e-7, pa);
  s.check("nilpotency_passes", nil_ok && jn.passes, nil_ok && jn.passes ? 1.0 : 0.0);
  s.check("exponent_above_n", r_max_excess == 0, static_cast<double>(r_max_excess));
  s.check("jordan_exponent", jn.r_used == 2, static_cast<double>(jn.r_used));
  return s;
}

inline Suite suite_support(Rng& rng) {
  Suite s;
  std::size_t disagree = 0, band = 0;
  for (int trial = 0; trial < 4; ++trial) {
    const CommutingTuple t = random_contractive_tuple(rng, 2 + trial, 2);
    const AnnihilatorFamily fam = build_annihilators(t, moment_curve_alphas(2, t.n()));
    std::vector<CPoint> probes;
    for (int k = 0; k < 20; ++k) probes.push_back(random_in_polydisk(rng, 2, 1.0));
    const SupportIdentityReport rep = support_spectrum_identity_check(t, fam, probes);
    disagree += rep.disagreements.size();
    band += rep.inconclusive;
  }
  s.check("three_way_disagreements", disagree == 0, static_cast<double>(disagree));
  s.metrics["inconclusive"] = band;
  return s;
}

}  // namespace app_detail

/// Full run: validates tolerances, creates the output directory, writes report.json.
inline RunResult run(const RunConfig& cfg);

namespace app_detail {

inline RunResult verify_all(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path dir = cfg.input_path;
  const Json manifest = read_json_file((dir / "manifest.json").string());
  const Json& list = json_detail::array(json_detail::field(manifest, "", "fixtures"), "/fixtures");
  RunResult r;
  Json fixtures = Json::object();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string p = "/fixtures/" + std::to_string(i);
    const auto name = json_detail::field(list[i], p, "name").get<std::string>();
    const auto cmd_name = json_detail::field(list[i], p, "command").get<std::string>();
    const auto file = json_detail::field(list[i], p, "input").get<std::string>();
    const auto expect = list[i].value("expect", std::string("pass"));
    const auto cmd = parse_command(cmd_name);
    if (!cmd || *cmd == Command::VerifyAll) throw SchemaError(p + "/command", "unknown command " + cmd_name);
    RunConfig sub = cfg;
    sub.command = *cmd;
    sub.input_path = (dir / file).string();
    sub.output_dir = (fs::path(cfg.output_dir) / name).string();
    const RunResult rr = run(sub);
    const bool ok = expect == to_string(rr.status);
    fixtures[name] = {{"command", cmd_name}, {"status", to_string(rr.status)}, {"expect", expect}, {"ok", ok}};
    r.status = combine(r.status, ok ? Status::Pass : Status::Fail);
  }
  Rng rng(cfg.seed);
  Json suites = Json::object();
  auto record = [&](const std::string& name, const Suite& s) {
    suites[name] = {{"status", to_string(s.status)}, {"metrics", s.metrics}};
    r.status = combine(r.status, s.status);
  };
  record("matrix_core", suite_matrix_core(rng));
  record("mpoly", suite_mpoly(rng));
  record("tuple_spectrum", suite_spectrum(rng, cfg.seed));
  record("cayley_hamilton", suite_cayley_hamilton(rng));
  record("bcl_model", suite_bcl(rng));
  record("rational_symbols", suite_symbols(rng));
  record("ideal_support", suite_support(rng));
  r.report = {{"fixtures", std::move(fixtures)}, {"invariants", std::move(suites)}};
  return r;
}

}  // namespace app_detail

inline RunResult run_command(Command cmd, const Json& input, const app_detail::Context& ctx) {
  switch (cmd) {
    case Command::JointSpectrum: return app_detail::joint_spectrum(input, ctx);
    case Command::Annihilate: return app_detail::annihilate(input, ctx);
    case Command::KoszulCheck: return app_detail::koszul_check(input, ctx);
    case Command::BclVariety: return app_detail::bcl_variety(input, ctx);
    case Command::PairXi: return app_detail::pair_xi(input, ctx);
    case Command::ToeplitzUnion: return app_detail::toeplitz_union(input, ctx);
    case Command::SupportCheck: return app_detail::support_check(input, ctx);
    default: throw InputError("run_command: verify-all is not a single-input command");
  }
}

inline RunResult run(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  app_detail::Context ctx;
  ctx.tol = default_tolerances();
  ctx.radii = cfg.grid_radii;
  ctx.angles = cfg.grid_angles;
  ctx.seed = cfg.seed;
  ctx.svg = cfg.svg;
  ctx.out = cfg.output_dir;

  RunResult r;
  Json tolerances = Json::object();
  try {
    for (const auto& [name, value] : cfg.tolerances) {
      if (!ctx.tol.contains(name)) throw InputError("unknown tolerance --tol." + name);
      if (!(value > 0.0) || !std::isfinite(value)) throw InputError("tolerance --tol." + name + " must be positive");
      ctx.tol[name] = value;
    }
    for (const auto& [name, value] : ctx.tol) tolerances[name] = value;
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec) throw InputError("cannot create output directory " + cfg.output_dir + ": " + ec.message());
    if (cfg.command == Command::VerifyAll) {
      r = app_detail::verify_all(cfg);
    } else {
      r = run_command(cfg.command, read_json_file(cfg.input_path), ctx);
    }
  } catch (const SchemaError& e) {
    r.status = Status::InputError;
    r.report = {{"error", e.what()}, {"where", e.where()}};
  } catch (const InputError& e) {
    r.status = Status::InputError;
    r.report = {{"error", e.what()}};
  } catch (const InconclusiveError& e) {
    r.status = Status::Inconclusive;
    r.report = {{"error", e.what()}};
  } catch (const NumericalError& e) {
    r.status = Status::Error;
    r.report = {{"error", e.what()}};
  } catch (const Json::exception& e) {
    r.status = Status::InputError;
    r.report = {{"error", std::string("JSON: ") + e.what()}};
  }
  r.report["command"] = to_string(cfg.command);
  r.report["status"] = to_string(r.status);
  r.report["seed"] = cfg.seed;
  r.report["tolerances"] = std::move(tolerances);
  std::error_code ec;
  if (fs::is_directory(ctx.out, ec)) {
    std::ofstream out(ctx.out / "report.json", std::ios::binary);
    out << r.report.dump(2) << '\n';
  }
  return r;
}

}  // namespace jointspec
