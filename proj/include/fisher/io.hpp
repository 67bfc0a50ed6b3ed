#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "fisher/adaptive.hpp"
#include "fisher/apm.hpp"
#include "fisher/generate.hpp"
#include "fisher/market.hpp"

namespace fisher {

using json = nlohmann::json;

inline Kind parse_kind(const std::string& s) {
  if (s == "linear") return Kind::Linear;
  if (s == "quasilinear") return Kind::QuasiLinear;
  throw Error(ErrorCode::BadInput, "unknown market kind: " + s);
}

inline json instance_to_json(const MarketInstance& inst) {
  json rows = json::array();
  for (int i = 0; i < inst.buyers(); ++i) {
    json row = json::array();
    for (int j = 0; j < inst.goods(); ++j) row.push_back(inst.value(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"kind", kind_name(inst.kind())},
              {"budgets", inst.budgets()},
              {"valuations", std::move(rows)}};
}

inline MarketInstance instance_from_json(const json& doc) {
  if (!doc.contains("kind") || !doc.contains("budgets") || !doc.contains("valuations"))
    throw Error(ErrorCode::BadInput, "instance file needs kind, budgets, valuations");
  Kind kind = parse_kind(doc.at("kind").get<std::string>());
  std::vector<double> budgets = doc.at("budgets").get<std::vector<double>>();
  std::vector<std::vector<double>> rows =
      doc.at("valuations").get<std::vector<std::vector<double>>>();
  return make_instance(kind, rows, std::move(budgets));
}

inline MarketInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadInput, "cannot open instance file: " + path);
  json doc = json::parse(in);
  return instance_from_json(doc);
}

inline void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::BadInput, "cannot write file: " + path);
  out << doc.dump(2) << "\n";
}

inline json certificate_to_json(const Certificate& cert) {
  return json{{"flow_value", cert.flow_value}, {"optimal", cert.optimal}, {"tol", cert.tol}};
}

inline json exact_result_to_json(const MarketInstance& inst, const ExactResult& res) {
  json alloc = json::array();
  if (!res.allocation.empty()) {
    for (int i = 0; i < inst.buyers(); ++i) {
      json row = json::array();
      for (int j = 0; j < inst.goods(); ++j)
        row.push_back(res.allocation[std::size_t(i) * inst.goods() + j]);
      alloc.push_back(std::move(row));
    }
  }
  return json{{"prices", res.prices},
              {"mu", res.mu_star},
              {"allocation", std::move(alloc)},
              {"certified", res.certified},
              {"delta_star", res.delta_star_observed},
              {"outer_iterations", res.outer_iterations},
              {"inner_iterations", res.inner_iterations_total},
              {"certificate", certificate_to_json(res.certificate)}};
}

// Trace CSV: header t,F,grad_norm, locale-independent decimal points.
inline void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::BadInput, "cannot write trace file: " + path);
  out << "t,F,grad_norm\n";
  char buf[128];
  for (const auto& pt : trace) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g\n", (long long)pt.t, pt.f, pt.grad_norm);
    out << buf;
  }
}

// Generic ratings loader: rows of buyer_id,item_id,rating build a sparse
// valuation matrix; rows/columns that end up all-zero are dropped until the
// nondegeneracy assumption holds.  Budgets are set to 1.
inline MarketInstance load_ratings_csv(const std::string& path, Kind kind) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadInput, "cannot open ratings file: " + path);
  std::map<std::string, int> buyer_ids, item_ids;
  std::vector<std::tuple<int, int, double>> triples;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string b, g, r;
    if (!std::getline(ss, b, ',') || !std::getline(ss, g, ',') || !std::getline(ss, r))
      throw Error(ErrorCode::BadInput, "ratings rows need buyer_id,item_id,rating");
    if (first) {
      first = false;
      char* end = nullptr;
      std::strtod(r.c_str(), &end);
      if (end == r.c_str()) continue;  // header row
    }
    int bi = buyer_ids.emplace(b, int(buyer_ids.size())).first->second;
    int gi = item_ids.emplace(g, int(item_ids.size())).first->second;
    triples.emplace_back(bi, gi, std::stod(r));
  }
  int n = int(buyer_ids.size()), m = int(item_ids.size());
  if (n == 0 || m == 0) throw Error(ErrorCode::BadInput, "ratings file has no data rows");
  std::vector<double> v(std::size_t(n) * m, 0.0);
  for (auto& [i, j, r] : triples) v[std::size_t(i) * m + j] = std::max(r, 0.0);

  // drop zero rows/columns until nondegenerate
  std::vector<int> keep_rows, keep_cols;
  for (;;) {
    keep_rows.clear();
    keep_cols.clear();
    for (int i = 0; i < n; ++i) {
      bool any = false;
      for (int j = 0; j < m; ++j) any = any || v[std::size_t(i) * m + j] > 0.0;
      if (any) keep_rows.push_back(i);
    }
    for (int j = 0; j < m; ++j) {
      bool any = false;
      for (int i = 0; i < n; ++i) any = any || v[std::size_t(i) * m + j] > 0.0;
      if (any) keep_cols.push_back(j);
    }
    if (int(keep_rows.size()) == n && int(keep_cols.size()) == m) break;
    if (keep_rows.empty() || keep_cols.empty())
      throw Error(ErrorCode::DegenerateMatrix, "ratings matrix is entirely zero");
    std::vector<double> w(keep_rows.size() * keep_cols.size());
    for (std::size_t a = 0; a < keep_rows.size(); ++a)
      for (std::size_t b = 0; b < keep_cols.size(); ++b)
        w[a * keep_cols.size() + b] = v[std::size_t(keep_rows[a]) * m + keep_cols[b]];
    v = std::move(w);
    n = int(keep_rows.size());
    m = int(keep_cols.size());
  }
  return MarketInstance(kind, std::move(v), std::vector<double>(n, 1.0), n, m);
}

}  // namespace fisher
