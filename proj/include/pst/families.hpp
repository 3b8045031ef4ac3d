// Named graph families and their closed-form transfer parameters.
//
// Site numbering is 0-based.  Unless noted, site 0 is the sending tail and
// the receiving tail is the last site of the outer path.
//
//   family                 sites    sender -> receiver
//   coutinho               6        0 -> 4
//   tri_coutinho           7        0 -> 4
//   coutinho_n8            8        0 -> 5
//   gen1 (n bridges)       n+5      0 -> 4
//   gen2 (chains of n)     2n+4     0 -> n+3
//   gen3 (k chains of n)   kn+4     0 -> n+3
//   wheatstone             6        0 -> 4
//   bipartite_wheatstone   7        0 -> 6
//   key_graph              8        0 -> 7
//   decorated8             8        corners 1 -> 5
//   decorated11            11       corners 1 -> 7
#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pst/givens.hpp"
#include "pst/graph.hpp"

namespace pst::families {

namespace detail {

inline void require_nonzero(std::string_view family, std::initializer_list<double> values) {
  for (double v : values)
    if (v == 0.0 || !std::isfinite(v))
      throw validation_error(std::string(family) + ": couplings must be finite and nonzero");
}

}  // namespace detail

/// Tail 0-1 (x), path 1-2-3 (z, z), tail 3-4 (x), bridge site 5 on 1 and 3 (y).
inline SpinGraph coutinho(double x, double y, double z) {
  detail::require_nonzero("coutinho", {x, y, z});
  return SpinGraph(6, {{0, 1, x}, {1, 2, z}, {2, 3, z}, {3, 4, x}, {1, 5, y}, {3, 5, y}});
}

struct CoutinhoPT {
  double x;
  double r2;  // y^2 + z^2
};

/// x = 2(2j+1), y^2 + z^2 = 2(4m^2 - (2j+1)^2), m > j >= 0.
inline CoutinhoPT coutinho_pt_params(int j, int m) {
  if (j < 0 || m <= j) throw validation_error("coutinho_pt_params needs m > j >= 0");
  const double odd = 2.0 * j + 1.0;
  return {2.0 * odd, 2.0 * (4.0 * double(m) * m - odd * odd)};
}

/// Coutinho graph with a second bridge site 6 on sites 1 and 3 (coupling w).
inline SpinGraph tri_coutinho(double x, double y, double z, double w) {
  detail::require_nonzero("tri_coutinho", {x, y, z, w});
  return SpinGraph(7, {{0, 1, x}, {1, 2, z}, {2, 3, z}, {3, 4, x}, {1, 5, y}, {3, 5, y}, {1, 6, w}, {3, 6, w}});
}

/// Hexagon between hubs 1 and 4: 1-2 (y), 2-3 (w), 3-4 (y) on top, 1-6 (z),
/// 6-7 (w), 7-4 (z) below, tails 0-1 and 4-5 (x).
inline SpinGraph coutinho_n8(double x, double y, double z, double w) {
  detail::require_nonzero("coutinho_n8", {x, y, z, w});
  return SpinGraph(8, {{0, 1, x}, {1, 2, y}, {2, 3, w}, {3, 4, y}, {4, 5, x}, {1, 6, z}, {6, 7, w}, {4, 7, z}});
}

/// Path 0-1-2-3-4 (x, z0, z0, x) with bridge sites 5.. each tied to sites 1
/// and 3 by z[k].  One bridge gives the Coutinho graph.
inline SpinGraph gen1(double x, double z0, std::span<const double> z) {
  if (z.empty()) throw validation_error("gen1 needs at least one bridge");
  detail::require_nonzero("gen1", {x, z0});
  std::vector<Edge> e{{0, 1, x}, {1, 2, z0}, {2, 3, z0}, {3, 4, x}};
  for (std::size_t k = 0; k < z.size(); ++k) {
    detail::require_nonzero("gen1", {z[k]});
    e.push_back({1, 5 + k, z[k]});
    e.push_back({3, 5 + k, z[k]});
  }
  return SpinGraph(5 + z.size(), std::move(e));
}

/// k parallel chains of n sites between hubs 1 and n+2, tails 0-1 and
/// (n+2)-(n+3) with coupling x.  Chain 0 occupies sites 2..n+1, chain l >= 1
/// sites n+4+(l-1)n ..; chain l meets both hubs with y[l] and carries the
/// internal couplings w[0..n-2].
inline SpinGraph gen3(std::size_t n, double x, std::span<const double> y, std::span<const double> w) {
  const std::size_t k = y.size();
  if (k < 2 || n < 1) throw validation_error("gen3 needs k >= 2 chains of n >= 1 sites");
  if (w.size() + 1 != n) throw validation_error("gen3 needs n-1 internal couplings");
  detail::require_nonzero("gen3", {x});
  for (double v : y) detail::require_nonzero("gen3", {v});
  for (double v : w) detail::require_nonzero("gen3", {v});
  const std::size_t hub = 1, far_hub = n + 2, far_tail = n + 3;
  std::vector<Edge> e{{0, hub, x}, {far_hub, far_tail, x}};
  for (std::size_t l = 0; l < k; ++l) {
    const std::size_t first = l == 0 ? 2 : n + 4 + (l - 1) * n;
    e.push_back({hub, first, y[l]});
    for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({first + i, first + i + 1, w[i]});
    e.push_back({first + n - 1, far_hub, y[l]});
  }
  return SpinGraph(k * n + 4, std::move(e));
}

/// Two parallel chains of n sites; top attached with y, bottom with z.
inline SpinGraph gen2(std::size_t n, double x, double y, double z, std::span<const double> w) {
  if (n < 2) throw validation_error("gen2 needs n >= 2");
  const double yz[2] = {y, z};
  return gen3(n, x, yz, w);
}

/// Coutinho graph plus the bridge 2-5 (w).
inline SpinGraph wheatstone(double x, double y, double z, double w) {
  detail::require_nonzero("wheatstone", {x, y, z, w});
  return SpinGraph(6, {{0, 1, x}, {1, 2, z}, {2, 3, z}, {3, 4, x}, {1, 5, y}, {3, 5, y}, {2, 5, w}});
}

/// Chain fields produced by reducing the Wheatstone bridge (generic params).
inline std::vector<double> wheatstone_fields(double x, double y, double z, double w) {
  const double S = y * y + z * z;
  if (S == 0.0) throw validation_error("wheatstone_fields needs y^2 + z^2 > 0");
  const double D = y * y - z * z;
  const double D2 = D * D;
  const double S3 = S * S * S;
  const double x2 = x * x, w2 = w * w;
  const double yz = y * z;
  const double y4z4 = (y * y * y * y - z * z * z * z);
  const double den = 4.0 * w2 * w2 * yz * yz * D2 + w2 * x2 * y4z4 * y4z4 + x2 * S3 * S * S;
  const double b3 = 2.0 * yz * w / S;
  const double b4 = -2.0 * w2 * w * yz * D2 / (S * (w2 * D2 + S3));
  const double b5 = 4.0 * w2 * w * yz * D2 * S * (w2 * (x2 * D2 - 2.0 * yz * yz * S) + x2 * S3) /
                    ((w2 * D2 + S3) * den);
  const double b6 = -2.0 * w * x2 * yz * S * (2.0 * w2 * D2 + S3) / den;
  return {0.0, 0.0, b3, b4, b5, b6};
}

/// Coutinho graph with its bridge split by a middle site:
/// 0 tail, 1 hub, 2 path middle, 3 far hub, 4 bridge site (y),
/// 5 bridge middle (w on 2-5 and 5-4), 6 far tail.
inline SpinGraph bipartite_wheatstone(double x, double y, double z, double w) {
  detail::require_nonzero("bipartite_wheatstone", {x, y, z, w});
  return SpinGraph(7, {{0, 1, x}, {1, 2, z}, {2, 3, z}, {1, 4, y}, {3, 4, y}, {2, 5, w}, {4, 5, w}, {3, 6, x}});
}

/// Hubs 1 and 6, each linked to a pair of sites with y (1: {2,3}, 6: {4,5}).
/// Straight links 2-4 and 3-5 carry w, the crossing bridges 2-5 and 3-4
/// carry v.  Tails 0-1 and 6-7 carry x.
inline SpinGraph key_graph(double x, double y, double v, double w) {
  detail::require_nonzero("key_graph", {x, y, v, w});
  return SpinGraph(8, {{0, 1, x}, {1, 2, y}, {1, 3, y}, {2, 4, w}, {3, 5, w}, {2, 5, v}, {3, 4, v},
                       {4, 6, y}, {5, 6, y}, {6, 7, x}});
}

struct KeyParams {
  double x, y, v, w;
};

/// Couplings giving the reduced six-site chain the spectrum
/// +-(2j+1), +-(2k+1), +-(2m+1).
inline KeyParams key_graph_params(int j, int k, int m) {
  if (j < 0 || !(j < k && k < m)) throw validation_error("key_graph_params needs 0 <= j < k < m");
  const double d = 2.0 * (j + m - k) + 1.0;
  const double x2 = (2.0 * j + 1.0) * (2.0 * k + 1.0) * (2.0 * m + 1.0) / d;
  const double y2 = 4.0 * (j + m + 1.0) * double(k - j) * double(m - k) / d;
  if (x2 < 0.0 || y2 < 0.0) throw validation_error("key_graph_params: negative radicand");
  const double vw = double(j + m - k) + 0.5;
  return {std::sqrt(x2), std::sqrt(y2), vw, vw};
}

/// Chain 0..6 (g1, v1, v2, v2, v1, g3) with a decoration 3-7 (g2).
inline SpinGraph decorated8(double g1, double g2, double g3, double v1, double v2) {
  detail::require_nonzero("decorated8", {g1, g2, g3, v1, v2});
  return SpinGraph(8, {{0, 1, g1}, {1, 2, v1}, {2, 3, v2}, {3, 4, v2}, {4, 5, v1}, {5, 6, g3}, {3, 7, g2}});
}

/// Chain 0..8 (g1, v1, v2, v3, v3, v2, v1, g1) with decorations 3-9 and 5-10 (g2).
inline SpinGraph decorated11(double g1, double g2, double v1, double v2, double v3) {
  detail::require_nonzero("decorated11", {g1, g2, v1, v2, v3});
  return SpinGraph(11, {{0, 1, g1}, {1, 2, v1}, {2, 3, v2}, {3, 4, v3}, {4, 5, v3}, {5, 6, v2}, {6, 7, v1},
                        {7, 8, g1}, {3, 9, g2}, {5, 10, g2}});
}

/// Closed-form seven-site chain obtained by reducing decorated8(1,1,1,v1,v2).
inline ChainBlock decorated8_reduced_general(double v1, double v2) {
  if (!(v1 > 0.0) || !(v2 > 0.0)) throw validation_error("decorated8_reduced_general needs v1, v2 > 0");
  const double s = std::sqrt(v2 * v2 + 1.0);
  return ChainBlock::chain({1.0, v1, v2, s, v1 * v2 / s, std::sqrt((v1 * v1 + v2 * v2 + 1.0) / (v2 * v2 + 1.0))});
}

// ---------------------------------------------------------------------------
// Name-based construction for the CLI and the fixtures.

using ParamMap = std::map<std::string, std::vector<double>, std::less<>>;

inline const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names{"coutinho",   "tri_coutinho",         "coutinho_n8", "gen1",
                                              "gen2",       "gen3",                 "wheatstone",  "bipartite_wheatstone",
                                              "key_graph",  "decorated8",           "decorated11"};
  return names;
}

namespace detail {

inline const std::vector<double>& lookup(const ParamMap& p, std::string_view family, std::string_view key) {
  auto it = p.find(key);
  if (it == p.end() || it->second.empty())
    throw validation_error(std::string(family) + ": missing parameter '" + std::string(key) + "'");
  return it->second;
}

inline double scalar(const ParamMap& p, std::string_view family, std::string_view key) {
  const auto& v = lookup(p, family, key);
  if (v.size() != 1) throw validation_error(std::string(family) + ": '" + std::string(key) + "' must be a scalar");
  return v.front();
}

inline int integer(const ParamMap& p, std::string_view family, std::string_view key) {
  const double v = scalar(p, family, key);
  if (v != std::round(v)) throw validation_error(std::string(family) + ": '" + std::string(key) + "' must be an integer");
  return int(v);
}

inline std::vector<double> list_or_empty(const ParamMap& p, std::string_view key) {
  auto it = p.find(key);
  return it == p.end() ? std::vector<double>{} : it->second;
}

}  // namespace detail

/// Builds a family from named parameters.  List parameters (gen1 z, gen2/gen3
/// w, gen3 y) take several values; key_graph accepts either x,y,v,w or j,k,m.
inline SpinGraph make_family(std::string_view name, const ParamMap& p) {
  using detail::scalar;
  if (name == "coutinho") return coutinho(scalar(p, name, "x"), scalar(p, name, "y"), scalar(p, name, "z"));
  if (name == "tri_coutinho")
    return tri_coutinho(scalar(p, name, "x"), scalar(p, name, "y"), scalar(p, name, "z"), scalar(p, name, "w"));
  if (name == "coutinho_n8")
    return coutinho_n8(scalar(p, name, "x"), scalar(p, name, "y"), scalar(p, name, "z"), scalar(p, name, "w"));
  if (name == "gen1") return gen1(scalar(p, name, "x"), scalar(p, name, "z0"), detail::lookup(p, name, "z"));
  if (name == "gen2") {
    const auto w = detail::list_or_empty(p, "w");
    return gen2(w.size() + 1, scalar(p, name, "x"), scalar(p, name, "y"), scalar(p, name, "z"), w);
  }
  if (name == "gen3") {
    const auto w = detail::list_or_empty(p, "w");
    return gen3(w.size() + 1, scalar(p, name, "x"), detail::lookup(p, name, "y"), w);
  }
  if (name == "wheatstone")
    return wheatstone(scalar(p, name, "x"), scalar(p, name, "y"), scalar(p, name, "z"), scalar(p, name, "w"));
  if (name == "bipartite_wheatstone")
    return bipartite_wheatstone(scalar(p, name, "x"), scalar(p, name, "y"), scalar(p, name, "z"),
                                scalar(p, name, "w"));
  if (name == "key_graph") {
    if (p.contains("j")) {
      const auto k = key_graph_params(detail::integer(p, name, "j"), detail::integer(p, name, "k"),
                                      detail::integer(p, name, "m"));
      const double v = p.contains("v") ? scalar(p, name, "v") : k.v;
      return key_graph(k.x, k.y, v, k.w);
    }
    return key_graph(scalar(p, name, "x"), scalar(p, name, "y"), scalar(p, name, "v"), scalar(p, name, "w"));
  }
  if (name == "decorated8")
    return decorated8(scalar(p, name, "g1"), scalar(p, name, "g2"), scalar(p, name, "g3"), scalar(p, name, "v1"),
                      scalar(p, name, "v2"));
  if (name == "decorated11")
    return decorated11(scalar(p, name, "g1"), scalar(p, name, "g2"), scalar(p, name, "v1"), scalar(p, name, "v2"),
                       scalar(p, name, "v3"));
  throw validation_error("unknown family '" + std::string(name) + "'");
}

}  // namespace pst::families
