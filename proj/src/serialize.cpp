#include "convalg/serialize.hpp"

#include <algorithm>

namespace convalg {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ParseError(what);
}

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  require(j.is_string(), "expected a rational string");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

long block_count(int N, int m) { return static_cast<long>(multisets(N, m).size()); }

}  // namespace

Json to_json(const Composition& v) { return v.parts(); }

Json to_json(const IntMatrix& a) { return a.rows(); }

Json to_json(const TransferArray& t) {
  Json out = Json::array();
  for (int i = 0; i < t.n(); ++i) {
    Json plane = Json::array();
    for (int j = 0; j < t.n(); ++j) {
      Json row = Json::array();
      for (int k = 0; k < t.n(); ++k) row.push_back(t.at(i, j, k));
      plane.push_back(row);
    }
    out.push_back(plane);
  }
  return out;
}

Json to_json(const Rational& q) { return to_string(q); }

Json to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (long i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back(to_json(Complex(m(i, j))));
    out.push_back(row);
  }
  return out;
}

Json to_json(const MonomialMatrix& m) {
  Json cols = Json::array();
  for (int j = 0; j < m.n(); ++j) cols.push_back({{"row", m.row_of(j) + 1}, {"exponent", m.exponent_of(j)}});
  return {{"modulus", m.n()}, {"columns", cols}};
}

Json to_json(const GroundSpace& g) {
  if (std::holds_alternative<ExactLine>(g)) return {{"kind", "exact_line"}};
  if (const auto* fs = std::get_if<FiniteSet>(&g)) {
    Json pts = Json::array();
    for (const auto& p : fs->points) pts.push_back(to_json(p));
    return {{"kind", "finite_set"}, {"points", pts}};
  }
  const auto& ts = std::get<TorusSampled>(g);
  return {{"kind", "torus"}, {"tau", to_json(ts.tau)}};
}

Json to_json(const BlockSymFunction& f) {
  const auto& shape = f.shape();
  if (f.is_polynomial()) {
    Json terms = Json::array();
    for (const auto& [key, c] : f.terms()) {
      Json sig = Json::array();
      for (int b = 0; b < shape.count(); ++b) {
        Json seg = Json::array();
        for (int k = 0; k < shape.size(b); ++k) seg.push_back(key[static_cast<std::size_t>(shape.offset(b) + k)]);
        sig.push_back(seg);
      }
      terms.push_back(Json::array({sig, to_json(c)}));
    }
    return {{"polynomial", terms}};
  }
  if (f.is_table()) {
    const int N = static_cast<int>(std::get<FiniteSet>(f.ground()).points.size());
    Json records = Json::array();
    const auto& values = f.values();
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
      if (values[idx] == 0) continue;
      std::vector<std::vector<int>> config(static_cast<std::size_t>(shape.count()));
      std::size_t rest = idx;
      for (int b = shape.count() - 1; b >= 0; --b) {
        const auto cnt = static_cast<std::size_t>(block_count(N, shape.size(b)));
        auto ms = multisets(N, shape.size(b))[rest % cnt];
        for (auto& p : ms) ++p;
        config[static_cast<std::size_t>(b)] = ms;
        rest /= cnt;
      }
      records.push_back({{"config", config}, {"value", to_json(values[idx])}});
    }
    return {{"table", records}};
  }
  throw std::invalid_argument("torus functions are closures and have no file form");
}

Json to_json(const ConvOperator& op) {
  Json terms = Json::array();
  for (const auto& [a, f] : op.terms()) terms.push_back({{"matrix", to_json(a)}, {"function", to_json(f)}});
  return {{"ground", to_json(op.ground())}, {"terms", terms}};
}

IntMatrix matrix_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), "matrix must be a non-empty array of rows");
  const auto n = j.size();
  std::vector<std::vector<int>> rows;
  for (const auto& r : j) {
    require(r.is_array() && r.size() == n, "matrix must be square");
    std::vector<int> row;
    for (const auto& x : r) {
      require(x.is_number_integer() && x.get<long>() >= 0, "matrix entries must be non-negative integers");
      row.push_back(x.get<int>());
    }
    rows.push_back(row);
  }
  return IntMatrix::from_rows(rows);
}

GroundSpace ground_from_json(const Json& j) {
  require(j.is_object() && j.contains("kind") && j["kind"].is_string(), "ground needs a kind");
  const auto kind = j["kind"].get<std::string>();
  if (kind == "exact_line") return ExactLine{};
  if (kind == "finite_set") {
    require(j.contains("points") && j["points"].is_array(), "finite_set ground needs points");
    FiniteSet fs;
    for (const auto& p : j["points"]) fs.points.push_back(rational_from_json(p));
    GroundSpace g = fs;
    try {
      validate_ground(g);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
    return g;
  }
  throw ParseError("unsupported ground kind '" + kind + "'");
}

BlockSymFunction function_from_json(const Json& j, const BlockShape& shape, const GroundSpace& ground) {
  require(j.is_object(), "function must be an object");
  if (std::holds_alternative<ExactLine>(ground)) {
    require(j.contains("polynomial") && j["polynomial"].is_array(), "exact_line functions need a polynomial");
    PolyTerms terms;
    for (const auto& t : j["polynomial"]) {
      require(t.is_array() && t.size() == 2 && t[0].is_array(), "polynomial term must be [signature, coefficient]");
      require(static_cast<int>(t[0].size()) == shape.count(), "signature needs one exponent list per block");
      OrbitKey key;
      for (int b = 0; b < shape.count(); ++b) {
        const auto& seg = t[0][static_cast<std::size_t>(b)];
        require(seg.is_array() && static_cast<int>(seg.size()) == shape.size(b), "exponent list length differs from block size");
        for (const auto& e : seg) {
          require(e.is_number_integer() && e.get<long>() >= 0 && e.get<long>() < 256, "exponents must be small non-negative integers");
          key.push_back(static_cast<std::uint8_t>(e.get<int>()));
        }
      }
      const auto c = rational_from_json(t[1]);
      PolyTerms one{{key, c}};
      // re-sorts each block; accumulate to merge equal signatures
      auto f = BlockSymFunction::polynomial(shape, one);
      for (const auto& [k, v] : f.terms()) terms[k] += v;
    }
    try {
      return BlockSymFunction::polynomial(shape, terms);
    } catch (const BoundExceeded& e) {
      throw ParseError(e.what());
    }
  }
  const auto& fs = std::get<FiniteSet>(ground);
  const int N = static_cast<int>(fs.points.size());
  require(j.contains("table") && j["table"].is_array(), "finite_set functions need a table");
  std::size_t total = 1;
  for (int b = 0; b < shape.count(); ++b) total *= static_cast<std::size_t>(block_count(N, shape.size(b)));
  std::vector<Rational> values(total, Rational(0));
  for (const auto& rec : j["table"]) {
    require(rec.is_object() && rec.contains("config") && rec.contains("value"), "table record needs config and value");
    const auto& cfg = rec["config"];
    require(cfg.is_array() && static_cast<int>(cfg.size()) == shape.count(), "config needs one point list per block");
    std::size_t idx = 0;
    for (int b = 0; b < shape.count(); ++b) {
      const auto& pts = cfg[static_cast<std::size_t>(b)];
      require(pts.is_array() && static_cast<int>(pts.size()) == shape.size(b), "config block size mismatch");
      std::vector<int> ms;
      for (const auto& p : pts) {
        require(p.is_number_integer() && p.get<long>() >= 1 && p.get<long>() <= N, "config point out of range");
        ms.push_back(p.get<int>() - 1);
      }
      std::sort(ms.begin(), ms.end());
      idx = idx * static_cast<std::size_t>(block_count(N, shape.size(b))) + multiset_rank(ms);
    }
    values[idx] = rational_from_json(rec["value"]);
  }
  return BlockSymFunction::table(shape, fs, std::move(values));
}

ConvOperator operator_from_json(const Json& j) {
  require(j.is_object() && j.contains("ground") && j.contains("terms") && j["terms"].is_array(),
          "operator needs ground and terms");
  const auto ground = ground_from_json(j["ground"]);
  ConvOperator op(ground);
  int n = -1;
  for (const auto& t : j["terms"]) {
    require(t.is_object() && t.contains("matrix") && t.contains("function"), "term needs matrix and function");
    const auto a = matrix_from_json(t["matrix"]);
    require(n < 0 || a.n() == n, "terms of different sizes n");
    n = a.n();
    op.add_term(a, function_from_json(t["function"], BlockShape::of_matrix(a), ground));
  }
  return op;
}

ConvOperator parse_operator(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return operator_from_json(j);
  } catch (const Json::exception& e) {
    throw ParseError(e.what());
  } catch (const BoundExceeded& e) {
    throw ParseError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

std::string dump_operator(const ConvOperator& op) { return to_json(op).dump(2) + "\n"; }

}  // namespace convalg
