#pragma once

#include "semihilb/blockops.hpp"
#include "semihilb/bounds.hpp"
#include "semihilb/generators.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace semihilb::io {

using json = nlohmann::ordered_json;

/// Matrices are row-major arrays of rows, each entry a [re, im] pair.
inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Complex entry_from_json(const json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw Error(Errc::io, "matrix entry must be a number or a [re, im] pair, got " + e.dump());
}

/// Accepts the nested row form (entries as pairs or plain reals), or a flat
/// row-major list of n*n entries. A list whose elements are all numeric arrays
/// of the list's own length is read as square rows of reals.
inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw Error(Errc::io, "matrix must be a non-empty array");
  bool real_rows = true;
  bool any_nested = false;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != j.size()) real_rows = false;
    else
      for (const auto& x : e)
        if (!x.is_number()) real_rows = false;
    if (e.is_array() && !e.empty() && e.front().is_array()) any_nested = true;
  }
  if (!any_nested && !real_rows) {
    const auto count = static_cast<Index>(j.size());
    const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(count))));
    if (n * n != count) throw Error(Errc::io, "flat matrix length is not a perfect square");
    Matrix m(n, n);
    for (Index k = 0; k < count; ++k) m(k / n, k % n) = entry_from_json(j[k]);
    return m;
  }
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Index>(j[i].size()) != cols)
      throw Error(Errc::io, "ragged matrix rows");
    for (Index c = 0; c < cols; ++c) m(i, c) = entry_from_json(j[i][c]);
  }
  return m;
}

inline json to_json(const RealMatrix& m) { return to_json(Matrix(m.cast<Complex>())); }

/// A context serialises only its source matrix; caches are rebuilt on load.
inline json context_to_json(const PsdContext& ctx) { return json{{"a", to_json(ctx.a())}}; }

inline ContextPtr context_from_json(const json& j, const ToleranceConfig& tol = {}) {
  if (j.is_object()) {
    if (!j.contains("a")) throw Error(Errc::io, "context object needs key 'a'");
    return make_context(matrix_from_json(j.at("a")), tol);
  }
  return make_context(matrix_from_json(j), tol);
}

inline json block_matrix_to_json(const BlockMatrix& bm) {
  json blocks = json::array();
  for (const Matrix& b : bm.blocks()) blocks.push_back(to_json(b));
  return json{{"d", bm.d()}, {"n", bm.n()}, {"blocks", std::move(blocks)}, {"a", to_json(bm.base_ctx()->a())}};
}

inline BlockMatrix block_matrix_from_json(const json& j, const ToleranceConfig& tol = {}) {
  for (const char* key : {"d", "n", "blocks", "a"})
    if (!j.contains(key)) throw Error(Errc::io, std::string("block matrix needs key '") + key + "'");
  const int d = j.at("d").get<int>();
  const auto n = j.at("n").get<Index>();
  ContextPtr ctx = make_context(matrix_from_json(j.at("a")), tol);
  if (ctx->dim() != n) throw Error(Errc::io, "'a' is not n x n");
  std::vector<Matrix> blocks;
  for (const auto& b : j.at("blocks")) blocks.push_back(matrix_from_json(b));
  return BlockMatrix(d, std::move(blocks), std::move(ctx));
}

inline json tolerance_to_json(const ToleranceConfig& t) {
  return json{{"rank_rtol", t.rank_rtol},
              {"cmp_atol", t.cmp_atol},
              {"theta_samples", t.theta_samples},
              {"theta_refine_tol", t.theta_refine_tol},
              {"gelfand_max_power", t.gelfand_max_power}};
}

inline ToleranceConfig tolerance_from_json(const json& j) {
  ToleranceConfig t;
  if (j.contains("rank_rtol")) t.rank_rtol = j.at("rank_rtol").get<double>();
  if (j.contains("cmp_atol")) t.cmp_atol = j.at("cmp_atol").get<double>();
  if (j.contains("theta_samples")) t.theta_samples = j.at("theta_samples").get<int>();
  if (j.contains("theta_refine_tol")) t.theta_refine_tol = j.at("theta_refine_tol").get<double>();
  if (j.contains("gelfand_max_power")) t.gelfand_max_power = j.at("gelfand_max_power").get<int>();
  t.validate();
  return t;
}

inline json gen_spec_to_json(const GenSpec& g) {
  return json{{"n", g.n},         {"d", g.d},         {"rank", g.rank},
              {"ensemble", ensemble_name(g.ensemble)}, {"scale", g.scale}, {"seed", g.seed}};
}

inline GenSpec gen_spec_from_json(const json& j) {
  GenSpec g;
  g.n = j.value("n", g.n);
  g.d = j.value("d", g.d);
  g.rank = j.value("rank", g.n);
  if (j.contains("ensemble")) g.ensemble = parse_ensemble(j.at("ensemble").get<std::string>());
  g.scale = j.value("scale", g.scale);
  g.seed = j.value("seed", g.seed);
  g.validate();
  return g;
}

/// Per-instance report. Timing is left out so reports are reproducible.
inline json report_to_json(const BoundReport& r) {
  json bounds = json::object(), gaps = json::object(), holds = json::object();
  for (BoundId id : kAllBounds) {
    bounds[bound_key(id)] = r.bound(id);
    gaps[bound_key(id)] = r.gap(id);
    holds[bound_key(id)] = r.held(id);
  }
  return json{{"instance_id", r.instance_id}, {"omega", r.omega},
              {"bounds", std::move(bounds)},   {"gaps", std::move(gaps)},
              {"holds", std::move(holds)},     {"refinement_ok", r.refinement_ok},
              {"all_hold", r.all_hold()}};
}

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string report_csv_header() {
  std::string h = "instance_id,omega";
  for (BoundId id : kAllBounds) h += std::string(",") + bound_key(id);
  return h + ",min_gap,all_hold";
}

inline std::string report_csv_row(const BoundReport& r) {
  std::string row = r.instance_id + "," + format_double(r.omega);
  for (double b : r.bounds) row += "," + format_double(b);
  return row + "," + format_double(r.min_gap()) + "," + (r.all_hold() ? "true" : "false");
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::io, path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write " + path);
  out << text;
  if (!out) throw Error(Errc::io, "write failed for " + path);
}

}  // namespace semihilb::io
