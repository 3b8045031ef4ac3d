// Acceptance runner.  Every criterion lives in fixtures/row_NN.json as a list
// of checks; this file interprets them.  Shared by `pstgraph verify-paper`
// and the acceptance test binary.
//
// Check types
//   probability    P_ab(t) against a closed form on a uniform grid
//   same_series    P_ab(t) identical while one parameter varies
//   chain          couplings / fields / null rows of a reduced block
//   spectrum       sorted eigenvalues
//   pt_verdict     verify_design verdict (and optionally tau)
//   jacobi         jacobi_from_spectrum against expected couplings
//   switching      retrieval with v = -w, then transfer after flipping v
//   random         seeded property draws, selected by "kind"
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pst/design.hpp"
#include "pst/expression.hpp"
#include "pst/families.hpp"
#include "pst/givens.hpp"
#include "pst/graph.hpp"
#include "pst/graph_io.hpp"
#include "pst/reference.hpp"
#include "pst/spectral.hpp"

#ifndef PST_FIXTURES_DIR
#define PST_FIXTURES_DIR "fixtures"
#endif

namespace pst::acceptance {

inline constexpr int row_count = 16;

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;  // largest deviation seen (meaning depends on the check)
  double tol = 0.0;
  std::string detail;
};

struct RowResult {
  int row = 0;
  std::string title;
  std::vector<CheckResult> checks;

  bool pass() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
  }
};

namespace detail {

inline double num(const json& v) { return pst::detail::number(v, "fixture value"); }

inline double num_or(const json& c, const char* key, double fallback) {
  return c.contains(key) ? num(c[key]) : fallback;
}

inline std::vector<double> nums(const json& arr) {
  std::vector<double> out;
  for (const auto& v : arr) out.push_back(num(v));
  return out;
}

inline families::ParamMap params(const json& obj) {
  families::ParamMap p;
  for (const auto& [k, v] : obj.items()) p[k] = v.is_array() ? nums(v) : std::vector<double>{num(v)};
  return p;
}

inline SpinGraph graph_of(const json& c) { return families::make_family(c.at("family").get<std::string>(), params(c.at("params"))); }

inline std::vector<double> grid(double t_max, std::size_t samples) {
  std::vector<double> t(samples);
  for (std::size_t k = 0; k < samples; ++k) t[k] = t_max * double(k) / double(samples - 1);
  return t;
}

inline CheckResult finish(std::string name, double worst, double tol, std::string detail = {}) {
  return {std::move(name), worst <= tol, worst, tol, std::move(detail)};
}

inline double max_dev(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double w = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) w = std::max(w, std::abs(a[k] - b[k]));
  return w;
}

inline std::vector<double> sorted_eigenvalues(const SymmetricMatrix& h) {
  const auto s = eigendecompose(h);
  std::vector<double> e(s.values.data(), s.values.data() + s.values.size());
  std::sort(e.begin(), e.end());
  return e;
}

// ---- plain checks ---------------------------------------------------------

inline CheckResult probability(const json& c) {
  const SpinGraph g = graph_of(c);
  const Propagator prop(one_excitation_hamiltonian(g));
  const auto a = c.at("from").get<std::size_t>(), b = c.at("to").get<std::size_t>();
  const auto f = Expression::parse(c.at("formula").get<std::string>());
  const double t_max = num_or(c, "t_max", 2.0 * std::numbers::pi);
  const auto samples = c.value("samples", std::size_t(1000));
  double worst = 0.0;
  for (double t : grid(t_max, samples)) worst = std::max(worst, std::abs(prop.probability(a, b, t) - f({{"t", t}})));
  return finish(c.at("name"), worst, num(c.at("tol")));
}

inline CheckResult same_series(const json& c) {
  const auto a = c.at("from").get<std::size_t>(), b = c.at("to").get<std::size_t>();
  const std::string key = c.at("vary");
  const auto values = nums(c.at("values"));
  const auto t = grid(2.0 * std::numbers::pi, c.value("samples", std::size_t(1000)));
  std::vector<double> first;
  double worst = 0.0;
  for (double v : values) {
    auto p = params(c.at("params"));
    p[key] = {v};
    const Propagator prop(one_excitation_hamiltonian(families::make_family(c.at("family").get<std::string>(), p)));
    std::vector<double> series;
    for (double tk : t) series.push_back(prop.probability(a, b, tk));
    if (first.empty()) first = series;
    else worst = std::max(worst, max_dev(first, series));
  }
  return finish(c.at("name"), worst, num(c.at("tol")));
}

inline CheckResult chain(const json& c) {
  const auto r = tridiagonalize(one_excitation_hamiltonian(graph_of(c)));
  const auto bi = c.value("block", std::size_t(0));
  if (bi >= r.blocks.size()) return {c.at("name"), false, INFINITY, num(c.at("tol")), "block missing"};
  const ChainBlock& blk = r.blocks[bi];
  const auto want = nums(c.at("couplings"));
  std::ostringstream d;
  double worst = max_dev(blk.offdiag, want);
  if (blk.offdiag.size() != want.size())
    d << "block has " << blk.length << " sites, expected " << want.size() + 1 << "; ";
  const auto fields = c.contains("fields") ? nums(c["fields"]) : std::vector<double>(want.size() + 1, 0.0);
  worst = std::max(worst, max_dev(blk.diag, fields));
  if (c.contains("null_rows")) {
    std::size_t null_rows = 0;
    for (const auto& b : r.blocks)
      if (b.null_block) null_rows += b.length;
    const auto expected = c["null_rows"].get<std::size_t>();
    if (null_rows != expected) {
      worst = INFINITY;
      d << null_rows << " null rows, expected " << expected;
    }
  }
  return finish(c.at("name"), worst, num(c.at("tol")), d.str());
}

inline CheckResult spectrum(const json& c) {
  const auto got = sorted_eigenvalues(one_excitation_hamiltonian(graph_of(c)));
  auto want = nums(c.at("eigenvalues"));
  std::sort(want.begin(), want.end());
  std::ostringstream d;
  d << "got";
  for (double e : got) d << ' ' << (std::abs(e) < 5e-13 ? 0.0 : e);
  return finish(c.at("name"), max_dev(got, want), num(c.at("tol")), d.str());
}

inline CheckResult pt_verdict(const json& c) {
  const auto v = verify_design(graph_of(c), c.at("from").get<std::size_t>(), c.at("to").get<std::size_t>());
  const std::string want = c.at("verdict");
  const std::string got = to_string(v.report.verdict);
  double worst = got == want ? 0.0 : INFINITY;
  const double tol = num_or(c, "tol", 1e-9);
  if (c.contains("tau")) {
    worst = std::max(worst, v.report.pt_time ? std::abs(*v.report.pt_time - num(c["tau"])) : INFINITY);
  }
  if (v.discrepancy) worst = INFINITY;
  return finish(c.at("name"), worst, tol, "verdict " + got + ", p* = " + std::to_string(v.best.p));
}

inline CheckResult jacobi(const json& c) {
  const auto blk = jacobi_from_spectrum(nums(c.at("spectrum")));
  return finish(c.at("name"), max_dev(blk.offdiag, nums(c.at("couplings"))), num(c.at("tol")));
}

inline CheckResult switching(const json& c) {
  auto p = params(c.at("params"));
  p["v"] = {num(c.at("v_retrieve"))};
  const SpinGraph retrieve = families::make_family("key_graph", p);
  p["v"] = {num(c.at("v_transfer"))};
  const SpinGraph transfer = families::make_family("key_graph", p);
  const SymmetricMatrix h1 = one_excitation_hamiltonian(retrieve), h2 = one_excitation_hamiltonian(transfer);
  const auto sched = retrieval_schedule(retrieve, 1);
  const Propagator prop(h1);

  std::ostringstream d;
  bool ok = true;
  double far = 0.0;
  const auto t = grid(2.0 * std::numbers::pi, 1000);
  for (std::size_t j : c.at("far_sites").get<std::vector<std::size_t>>())
    for (double tk : t) far = std::max(far, prop.probability(0, j, tk));
  ok = ok && far < num(c.at("far_tol"));
  d << "far max " << far;

  const double omega = num(c.at("omega"));
  const double surv = sched.max_survival_deviation(h1, 2.0 * std::numbers::pi);
  const double omega_dev = std::abs(sched.omega - omega);
  ok = ok && surv < num(c.at("survival_tol")) && omega_dev < num(c.at("survival_tol"));
  d << ", survival dev " << surv << ", omega " << sched.omega;

  const auto psi = piecewise_evolve({{h1, sched.times.front()}, {h2, num(c.at("transfer_time"))}}, 0);
  const double final_p = std::norm(psi(Eigen::Index(c.at("final_site").get<std::size_t>())));
  const double miss = 1.0 - final_p;
  ok = ok && miss < num(c.at("final_tol"));
  d << ", final P " << final_p;

  CheckResult r{c.at("name"), ok, std::max({far, surv, miss}), num(c.at("final_tol")), d.str()};
  return r;
}

// ---- seeded property draws ------------------------------------------------

struct Draw {
  std::mt19937_64 rng;
  double lo, hi;
  double operator()() { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double in(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  std::size_t pick(std::size_t a, std::size_t b) { return std::uniform_int_distribution<std::size_t>(a, b)(rng); }
};

inline Draw draw_of(const json& c) {
  return {std::mt19937_64(c.value("seed", std::uint64_t(1))), num_or(c, "lo", 0.3), num_or(c, "hi", 3.0)};
}

inline SpinGraph random_graph(Draw& d, std::size_t n, bool with_fields) {
  std::vector<Edge> e;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (d.in(0.0, 1.0) < 0.5) {
        double J = d.in(0.2, 2.0);
        if (d.in(0.0, 1.0) < 0.5) J = -J;
        e.push_back({u, v, J});
      }
  std::vector<double> f(n, 0.0);
  if (with_fields)
    for (auto& b : f) b = d.in(-1.0, 1.0);
  return SpinGraph(n, std::move(e), std::move(f));
}

inline SymmetricMatrix random_symmetric(Draw& d, std::size_t n) {
  SymmetricMatrix h(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) h.set(i, j, d.in(-1.0, 1.0));
  return h;
}

inline CheckResult random_check(const json& c) {
  const std::string kind = c.at("kind");
  const std::string name = c.at("name");
  const double tol = num(c.at("tol"));
  const auto draws = c.value("draws", std::size_t(20));
  Draw d = draw_of(c);
  double worst = 0.0;
  std::ostringstream note;

  if (kind == "coutinho_chain") {
    for (std::size_t k = 0; k < draws; ++k) {
      const double x = d(), y = d(), z = d();
      const auto r = tridiagonalize(one_excitation_hamiltonian(families::coutinho(x, y, z)));
      const double s = std::hypot(y, z);
      worst = std::max({worst, max_dev(r.blocks.front().offdiag, {x, s, s, x}),
                        max_dev(r.blocks.front().diag, std::vector<double>(5, 0.0))});
    }
  } else if (kind == "coutinho_pt_params") {
    for (const auto& jm : c.at("pairs")) {
      const auto prm = families::coutinho_pt_params(jm[0].get<int>(), jm[1].get<int>());
      const double y = std::sqrt(prm.r2 / 3.0), z = std::sqrt(2.0 * prm.r2 / 3.0);
      const auto v = verify_design(families::coutinho(prm.x, y, z), 0, 4);
      if (v.report.verdict != Verdict::PT || v.discrepancy) {
        worst = INFINITY;
        note << "(" << jm[0] << "," << jm[1] << ") gave " << to_string(v.report.verdict) << "; ";
      } else {
        worst = std::max(worst, 1.0 - v.best.p);
      }
    }
  } else if (kind == "bridge_families") {
    const double tau = std::numbers::pi / 2.0;
    auto split = [&](double total2, std::size_t parts) {
      std::vector<double> w(parts);
      double s = 0.0;
      for (auto& v : w) {
        v = d();
        s += v * v;
      }
      for (auto& v : w) v *= std::sqrt(total2 / s);
      return w;
    };
    auto transfer = [&](const SpinGraph& g, std::size_t to) {
      return transfer_probability(one_excitation_hamiltonian(g), 0, to, tau);
    };
    for (std::size_t n = 1; n <= 5; ++n) {  // bridges tied to the hubs
      const auto J = chain_pt_couplings(5);
      auto parts = split(J[1] * J[1], n + 1);
      const double z0 = parts.back();
      parts.pop_back();
      worst = std::max(worst, 1.0 - transfer(families::gen1(J[0], z0, parts), 4));
    }
    for (std::size_t k = 2; k <= 4; ++k) {
      for (std::size_t n = 1; n <= 5; ++n) {
        if (k == 2 && n < 2) continue;
        const auto J = chain_pt_couplings(n + 4);
        const auto y = split(J[1] * J[1], k);
        const std::vector<double> w(J.begin() + 2, J.begin() + 2 + long(n) - 1);
        const SpinGraph g = k == 2 ? families::gen2(n, J[0], y[0], y[1], w) : families::gen3(n, J[0], y, w);
        worst = std::max(worst, 1.0 - transfer(g, n + 3));
      }
    }
    note << "smallest P(pi/2) = " << 1.0 - worst;
  } else if (kind == "wheatstone_fields") {
    for (std::size_t k = 0; k < draws; ++k) {
      const double x = d(), y = d(), z = d(), w = d();
      const auto r = tridiagonalize(one_excitation_hamiltonian(families::wheatstone(x, y, z, w)));
      std::vector<double> diag(6);
      for (std::size_t i = 0; i < 6; ++i) diag[i] = r.T(i, i);
      worst = std::max(worst, max_dev(diag, families::wheatstone_fields(x, y, z, w)));
    }
  } else if (kind == "wheatstone_symmetric") {
    for (std::size_t k = 0; k < draws; ++k) {
      const double x = d(), y = d(), w = d();
      const SpinGraph g = families::wheatstone(x, y, y, w);
      const auto r = tridiagonalize(one_excitation_hamiltonian(g));
      const double s = std::sqrt(2.0) * y;
      const std::vector<double> diag{0, 0, w, 0, 0, -w}, off{x, s, s, x, 0};
      std::vector<double> gd(6), go(5);
      for (std::size_t i = 0; i < 6; ++i) gd[i] = r.T(i, i);
      for (std::size_t i = 0; i < 5; ++i) go[i] = r.T(i, i + 1);
      worst = std::max({worst, max_dev(gd, diag), max_dev(go, off)});
      const auto v = verify_design(g, 0, 4);
      if (v.report.verdict != Verdict::NoPT) {
        worst = INFINITY;
        note << "draw " << k << " gave " << to_string(v.report.verdict) << "; ";
      }
    }
  } else if (kind == "decorated8_general") {
    for (std::size_t k = 0; k < draws; ++k) {
      const double v1 = d(), v2 = d();
      const auto r = tridiagonalize(one_excitation_hamiltonian(families::decorated8(1, 1, 1, v1, v2)));
      worst = std::max(worst, max_dev(r.blocks.front().offdiag, families::decorated8_reduced_general(v1, v2).offdiag));
    }
  } else if (kind == "jacobi_roundtrip") {
    const auto max_n = c.value("max_n", std::size_t(12));
    for (std::size_t k = 0; k < draws; ++k) {
      const std::size_t n = d.pick(2, max_n);
      std::vector<double> J(n - 1);
      for (std::size_t i = 0; i < (n - 1 + 1) / 2; ++i) J[i] = J[n - 2 - i] = d();
      const auto spec = eigendecompose(ChainBlock::chain(J));
      const auto back = jacobi_from_spectrum({spec.values.data(), spec.values.data() + spec.values.size()});
      worst = std::max(worst, max_dev(back.offdiag, J));
    }
  } else if (kind == "spectrum_preservation" || kind == "orthogonality") {
    const auto max_n = c.value("max_n", std::size_t(64));
    for (std::size_t k = 0; k < draws; ++k) {
      const std::size_t n = k == 0 ? max_n : d.pick(1, max_n);
      const auto h = random_symmetric(d, n);
      const auto r = tridiagonalize(h);
      if (kind == "orthogonality") {
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(Eigen::Index(n), Eigen::Index(n));
        worst = std::max(worst, (r.Q * r.Q.transpose() - I).cwiseAbs().maxCoeff());
        worst = std::max(worst, (r.Q * h.dense() * r.Q.transpose() - r.T.dense()).cwiseAbs().maxCoeff() /
                                    std::max(1.0, h.max_abs()));
      } else {
        worst = std::max(worst, max_dev(sorted_eigenvalues(h), sorted_eigenvalues(r.T)) / h.max_abs());
      }
    }
  } else if (kind == "identity_on_tridiagonal") {
    for (std::size_t k = 0; k < draws; ++k) {
      const std::size_t n = d.pick(1, 20);
      SymmetricMatrix h(n);
      for (std::size_t i = 0; i < n; ++i) h.set(i, i, d.in(-1.0, 1.0));
      for (std::size_t i = 0; i + 1 < n; ++i) h.set(i, i + 1, d());
      const auto r = tridiagonalize(h);
      const bool identity = r.rotations.empty() && r.Q == Eigen::MatrixXd::Identity(Eigen::Index(n), Eigen::Index(n)) &&
                            r.T == h;
      const auto again = tridiagonalize(tridiagonalize(random_symmetric(d, n)).T);
      if (!identity || !again.rotations.empty()) {
        worst = INFINITY;
        note << "draw " << k << " (n=" << n << ") rotated; ";
      }
    }
  } else if (kind == "unitarity") {
    for (std::size_t k = 0; k < draws; ++k) {
      const std::size_t n = d.pick(2, 10);
      const Propagator prop(one_excitation_hamiltonian(random_graph(d, n, true)));
      const std::size_t a = d.pick(0, n - 1);
      const double t = d.in(0.0, 20.0);
      double total = 0.0;
      for (std::size_t b = 0; b < n; ++b) total += prop.probability(a, b, t);
      worst = std::max({worst, std::abs(total - 1.0),
                        std::abs(prop.probability(a, (a + 1) % n, t) - prop.probability((a + 1) % n, a, t)),
                        std::abs(prop.probability(a, (a + 1) % n, t) - prop.probability(a, (a + 1) % n, -t))});
    }
  } else if (kind == "bipartite_symmetry") {
    for (std::size_t k = 0; k < draws; ++k) {
      const std::size_t n = d.pick(2, 12);
      std::vector<int> side(n);
      for (auto& s : side) s = d.in(0.0, 1.0) < 0.5;
      std::vector<Edge> e;
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v)
          if (side[u] != side[v] && d.in(0.0, 1.0) < 0.6) e.push_back({u, v, d.in(0.2, 2.0) * (d.in(0, 1) < 0.5 ? -1 : 1)});
      const SpinGraph g(n, std::move(e));
      if (!is_bipartite(g)) {
        worst = INFINITY;
        note << "draw " << k << " not recognised as bipartite; ";
        continue;
      }
      const auto h = one_excitation_hamiltonian(g);
      auto ev = sorted_eigenvalues(h);
      std::vector<double> neg(ev.rbegin(), ev.rend());
      for (auto& x : neg) x = -x;
      worst = std::max(worst, max_dev(ev, neg) / std::max(1.0, h.max_abs()));
    }
  } else if (kind == "oracle_equivalence") {
    for (std::size_t k = 0; k < draws; ++k) {
      const std::size_t n = d.pick(2, 10);
      const auto h = one_excitation_hamiltonian(random_graph(d, n, true));
      const std::size_t a = d.pick(0, n - 1);
      const double t = d.in(0.0, 10.0);
      Amplitudes psi = Amplitudes::Zero(Eigen::Index(n));
      psi(Eigen::Index(a)) = 1.0;
      const Amplitudes x = Propagator(h).evolve(psi, t);
      const Amplitudes y = taylor_evolve(h, psi, t);
      worst = std::max(worst, (x - y).cwiseAbs().maxCoeff());
    }
  } else {
    throw validation_error("unknown random check kind '" + kind + "'");
  }
  return finish(name, worst, tol, note.str());
}

inline CheckResult run_check(const json& c) {
  const std::string type = c.at("type");
  try {
    if (type == "probability") return probability(c);
    if (type == "same_series") return same_series(c);
    if (type == "chain") return chain(c);
    if (type == "spectrum") return spectrum(c);
    if (type == "pt_verdict") return pt_verdict(c);
    if (type == "jacobi") return jacobi(c);
    if (type == "switching") return switching(c);
    if (type == "random") return random_check(c);
  } catch (const std::exception& e) {
    return {c.value("name", type), false, INFINITY, 0.0, std::string("error: ") + e.what()};
  }
  return {c.value("name", type), false, INFINITY, 0.0, "unknown check type '" + type + "'"};
}

}  // namespace detail

inline std::string fixture_path(int row, const std::string& dir = PST_FIXTURES_DIR) {
  char name[32];
  std::snprintf(name, sizeof name, "row_%02d.json", row);
  return (std::filesystem::path(dir) / name).string();
}

inline RowResult run_row(int row, const std::string& dir = PST_FIXTURES_DIR) {
  RowResult r;
  r.row = row;
  json doc;
  try {
    doc = read_json_file(fixture_path(row, dir));
  } catch (const std::exception& e) {
    r.title = "fixture unavailable";
    r.checks.push_back({"load", false, INFINITY, 0.0, e.what()});
    return r;
  }
  r.title = doc.value("title", "");
  for (const auto& c : doc.at("checks")) r.checks.push_back(detail::run_check(c));
  return r;
}

inline std::vector<RowResult> run_all(const std::string& dir = PST_FIXTURES_DIR) {
  std::vector<RowResult> out;
  for (int row = 1; row <= row_count; ++row) out.push_back(run_row(row, dir));
  return out;
}

/// One line per row; failing checks are named with their deviation.
inline std::string summary_line(const RowResult& r) {
  std::ostringstream os;
  char head[48];
  std::snprintf(head, sizeof head, "row %02d %s  ", r.row, r.pass() ? "PASS" : "FAIL");
  os << head << r.title;
  double worst = 0.0;
  for (const auto& c : r.checks)
    if (c.pass) worst = std::max(worst, c.worst);
  if (r.pass()) {
    os << "  [worst " << std::scientific;
    os.precision(1);
    os << worst << "]";
  } else {
    for (const auto& c : r.checks) {
      if (c.pass) continue;
      os << "  | " << c.name << ": ";
      os.precision(3);
      if (std::isfinite(c.worst)) os << "dev " << c.worst << " > tol " << c.tol;
      else os << "failed";
      if (!c.detail.empty()) os << " (" << c.detail << ")";
    }
  }
  return os.str();
}

}  // namespace pst::acceptance
