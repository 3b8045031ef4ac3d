// `pstgraph` command line.  run() is callable from tests with any streams.
//
// Exit codes: 0 ok, 1 usage, 2 invalid input, 3 check failed.
#pragma once

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pst/acceptance.hpp"
#include "pst/design.hpp"
#include "pst/expression.hpp"
#include "pst/families.hpp"
#include "pst/givens.hpp"
#include "pst/graph_io.hpp"
#include "pst/spectral.hpp"

namespace pst::cli {

enum Exit : int { ok = 0, usage = 1, invalid = 2, failed = 3 };

namespace detail {

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(evaluate(item));
  }
  if (out.empty()) throw validation_error("empty list '" + text + "'");
  return out;
}

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw validation_error("cannot write '" + path + "'");
  f << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json report_json(const DesignVerification& v) {
  const PTReport& r = v.report;
  json j;
  j["verdict"] = to_string(r.verdict);
  j["mirror_symmetric"] = r.mirror_symmetric;
  j["eigenvalues"] = r.eigenvalues;
  j["gap_integers"] = r.gap_integers ? json(*r.gap_integers) : json(nullptr);
  j["pt_time"] = r.pt_time ? json(*r.pt_time) : json(nullptr);
  j["diagnostics"] = r.diagnostics;
  j["chain_test"] = v.chain_test;
  j["discrepancy"] = v.discrepancy;
  j["t_max"] = v.t_max;
  j["t_star"] = v.best.t;
  j["p_star"] = v.best.p;
  return j;
}

inline json report_json(const PTReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["mirror_symmetric"] = r.mirror_symmetric;
  j["gap_integers"] = r.gap_integers ? json(*r.gap_integers) : json(nullptr);
  j["pt_time"] = r.pt_time ? json(*r.pt_time) : json(nullptr);
  j["diagnostics"] = r.diagnostics;
  return j;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Perfect state transfer on weighted qubit graphs", "pstgraph"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Seed for every randomized path");

  // family
  std::string fam_name, fam_out;
  std::vector<std::string> fam_sets;
  auto* fam = app.add_subcommand("family", "Build a named graph family and write its JSON");
  fam->add_option("name", fam_name, "Family name")->required();
  fam->add_option("--set", fam_sets, "Parameter binding k=v (v may be an expression or a comma list)");
  fam->add_option("-o,--output", fam_out, "Output file (default stdout)");

  // reduce
  std::string red_in, red_out;
  std::optional<double> red_tol;
  bool red_q = false;
  auto* red = app.add_subcommand("reduce", "Tridiagonalize a graph's one-excitation matrix");
  red->add_option("graph", red_in)->required();
  red->add_option("--tol", red_tol, "Zero tolerance (default 1e-12 max|h|)");
  red->add_flag("--emit-q", red_q, "Include the orthogonal transform");
  red->add_option("-o,--output", red_out);

  // check-pt
  std::string pt_in;
  std::size_t pt_from = 0, pt_to = 0;
  std::optional<double> pt_tmax;
  auto* chk = app.add_subcommand("check-pt", "Decide perfect transfer between two sites");
  chk->add_option("graph", pt_in)->required();
  chk->add_option("--from", pt_from)->required();
  chk->add_option("--to", pt_to)->required();
  chk->add_option("--t-max", pt_tmax, "Search window for the numeric check");

  // evolve
  std::string ev_in, ev_out;
  std::size_t ev_from = 0, ev_to = 0, ev_steps = 1000;
  std::string ev_tmax = "2*pi";
  auto* evo = app.add_subcommand("evolve", "Sample P_ab(t) on a uniform grid as CSV");
  evo->add_option("graph", ev_in)->required();
  evo->add_option("--from", ev_from)->required();
  evo->add_option("--to", ev_to)->required();
  evo->add_option("--t-max", ev_tmax, "End time (expression)");
  evo->add_option("--steps", ev_steps, "Number of samples including endpoints");
  evo->add_option("-o,--output", ev_out);

  // design
  std::string de_in, de_out, de_spec, de_coup;
  std::optional<std::size_t> de_chain;
  std::size_t de_seeds = 32, de_sender = 0;
  double de_tol = 1e-10;
  auto* des = app.add_subcommand("design", "Solve unknown couplings of a template for a target chain");
  des->add_option("template", de_in)->required();
  auto* t1 = des->add_option("--target-chain", de_chain, "Target the N-site chain J_n = sqrt(n(N-n))");
  auto* t2 = des->add_option("--target-spectrum", de_spec, "Target the mirror chain with this spectrum");
  auto* t3 = des->add_option("--target-couplings", de_coup, "Target zero-field chain couplings");
  t1->excludes(t2, t3);
  t2->excludes(t3);
  des->add_option("--seeds", de_seeds, "Random restarts");
  des->add_option("--sender", de_sender, "Site the reduction starts from");
  des->add_option("--tol", de_tol, "Residual tolerance");
  des->add_option("-o,--output", de_out);

  // jacobi-from-spectrum
  std::string js_in, js_out;
  auto* jac = app.add_subcommand("jacobi-from-spectrum", "Mirror-symmetric chain with a given spectrum");
  jac->add_option("spectrum", js_in, "Comma separated eigenvalues")->required();
  jac->add_option("-o,--output", js_out);

  // switch-demo
  std::size_t sw_retrievals = 2;
  auto* sw = app.add_subcommand("switch-demo", "Key-graph retrieval then transfer by flipping v");
  sw->add_option("--retrievals", sw_retrievals, "Retrieval times to list");

  // verify-paper
  std::string vp_dir = PST_FIXTURES_DIR;
  std::optional<int> vp_row;
  auto* vp = app.add_subcommand("verify-paper", "Run every acceptance criterion");
  vp->add_option("--fixtures", vp_dir, "Fixture directory");
  vp->add_option("--row", vp_row, "Run a single row")->check(CLI::Range(1, acceptance::row_count));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Exit::ok : Exit::usage;
  }

  try {
    if (*fam) {
      families::ParamMap p;
      for (const auto& s : fam_sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw validation_error("--set expects k=v, got '" + s + "'");
        p[s.substr(0, eq)] = detail::parse_list(s.substr(eq + 1));
      }
      detail::emit(detail::dump(graph_to_json(families::make_family(fam_name, p))), fam_out, out);
      return Exit::ok;
    }
    if (*red) {
      const auto r = tridiagonalize(one_excitation_hamiltonian(load_graph(red_in)), red_tol);
      detail::emit(detail::dump(to_json(r, red_q)), red_out, out);
      return Exit::ok;
    }
    if (*chk) {
      const auto v = verify_design(load_graph(pt_in), pt_from, pt_to, pt_tmax);
      out << detail::dump(detail::report_json(v));
      if (v.discrepancy) err << "warning: chain verdict and numeric search disagree\n";
      return v.report.verdict == Verdict::PT ? Exit::ok : Exit::failed;
    }
    if (*evo) {
      const auto s = probability_series(one_excitation_hamiltonian(load_graph(ev_in)), ev_from, ev_to,
                                        evaluate(ev_tmax), ev_steps);
      std::ostringstream os;
      write_csv(os, s);
      detail::emit(os.str(), ev_out, out);
      return Exit::ok;
    }
    if (*des) {
      DesignProblem prob;
      prob.graph = load_template(de_in);
      prob.seeds = de_seeds;
      prob.seed = seed;
      prob.sender = de_sender;
      if (de_chain) prob.target = ChainBlock::chain(chain_pt_couplings(*de_chain));
      else if (!de_spec.empty()) prob.target = jacobi_from_spectrum(detail::parse_list(de_spec));
      else if (!de_coup.empty()) prob.target = ChainBlock::chain(detail::parse_list(de_coup));
      else throw CLI::RequiredError("--target-chain, --target-spectrum or --target-couplings");
      const auto sols = solve_parameters(prob, de_tol);
      json arr = json::array();
      for (const auto& s : sols)
        arr.push_back({{"assignment", s.assignment}, {"residual", s.residual},
                       {"pt_report", detail::report_json(s.pt_report)}});
      detail::emit(detail::dump(arr), de_out, out);
      err << sols.size() << " distinct solution(s) from " << de_seeds << " restarts\n";
      return sols.empty() ? Exit::failed : Exit::ok;
    }
    if (*jac) {
      const auto b = jacobi_from_spectrum(detail::parse_list(js_in));
      detail::emit(detail::dump(to_json(b)), js_out, out);
      return Exit::ok;
    }
    if (*sw) {
      const auto prm = families::key_graph_params(0, 1, 2);
      const SpinGraph hold = families::key_graph(prm.x, prm.y, -prm.v, prm.w);
      const SpinGraph send = families::key_graph(prm.x, prm.y, prm.v, prm.w);
      const auto sched = retrieval_schedule(hold, sw_retrievals);
      const auto h1 = one_excitation_hamiltonian(hold), h2 = one_excitation_hamiltonian(send);
      const Propagator p1(h1);
      out << std::setprecision(17);
      out << "hold v=" << -prm.v << " omega=" << sched.omega << '\n';
      out << "far sites";
      for (auto s : sched.far_sites) out << ' ' << s;
      out << '\n';
      for (double t : sched.times) out << "retrieval t=" << t << " P00=" << p1.probability(0, 0, t) << '\n';
      const double t_flip = sched.times.front();
      const double t_send = std::numbers::pi / 2.0;
      out << "flip v=" << prm.v << " at t=" << t_flip << '\n';
      const auto psi = piecewise_evolve({{h1, t_flip}, {h2, t_send}}, 0);
      const double p_final = std::norm(psi(7));
      out << "arrival t=" << t_flip + t_send << " P07=" << p_final << '\n';
      return p_final > 1.0 - 1e-9 ? Exit::ok : Exit::failed;
    }
    if (*vp) {
      bool all = true;
      for (int row = 1; row <= acceptance::row_count; ++row) {
        if (vp_row && row != *vp_row) continue;
        const auto r = acceptance::run_row(row, vp_dir);
        all = all && r.pass();
        out << acceptance::summary_line(r) << '\n';
      }
      return all ? Exit::ok : Exit::failed;
    }
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return Exit::usage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return Exit::invalid;
  } catch (const expression_error& e) {
    err << "error: " << e.what() << '\n';
    return Exit::invalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return Exit::invalid;
  }
  return Exit::usage;
}

}  // namespace pst::cli
