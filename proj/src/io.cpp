#include "hypercone/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "hypercone/error.hpp"

namespace hypercone {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::InvalidInput, (path.empty() ? std::string("/") : path) + ": " + what);
}

void only_keys(const Json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) schema_error(path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) schema_error(path + "/" + k, "unknown key");
  }
}

const Json& member(const Json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) schema_error(path + "/" + key, "missing");
  return j.at(key);
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) schema_error(path, "number is not finite");
  return x;
}

std::vector<double> numbers(const Json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "/" + std::to_string(i)));
  return out;
}

// Rows of a square array of the given size.
Mat square(const Json& j, const std::string& path, int size) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(size)) {
    schema_error(path, "expected " + std::to_string(size) + " rows");
  }
  Mat m(size, size);
  for (int r = 0; r < size; ++r) {
    const std::string rp = path + "/" + std::to_string(r);
    const auto row = numbers(j[static_cast<std::size_t>(r)], rp);
    if (row.size() != static_cast<std::size_t>(size)) {
      schema_error(rp, "expected " + std::to_string(size) + " entries");
    }
    for (int c = 0; c < size; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

// Basis vectors listed one per row, returned as columns.
Mat basis_rows(const Json& j, const std::string& path, int size) {
  return square(j, path, size).transpose();
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const auto cut = what.find("syntax error");
    if (cut != std::string::npos) what = what.substr(cut);
    throw Error(ErrorKind::InvalidInput,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
}

SystemSpec system_from_json(const Json& j, const std::string& path) {
  only_keys(j, path, {"dimension", "matrices", "weights", "cone"});
  SystemSpec s;
  const Json& dim = member(j, path, "dimension");
  if (!dim.is_number_integer() || dim.get<long long>() < 2 || dim.get<long long>() > 64) {
    schema_error(path + "/dimension", "expected an integer in [2, 64]");
  }
  s.dimension = static_cast<int>(dim.get<long long>());
  const Json& mats = member(j, path, "matrices");
  if (!mats.is_array() || mats.empty()) schema_error(path + "/matrices", "expected a non-empty array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < mats.size(); ++i) {
    const std::string mp = path + "/matrices/" + std::to_string(i);
    only_keys(mats[i], mp, {"label", "entries"});
    const Json& label = member(mats[i], mp, "label");
    if (!label.is_string() || label.get<std::string>().empty()) {
      schema_error(mp + "/label", "expected a non-empty string");
    }
    if (!seen.insert(label.get<std::string>()).second) schema_error(mp + "/label", "duplicate label");
    s.labels.push_back(label.get<std::string>());
    s.matrices.push_back(square(member(mats[i], mp, "entries"), mp + "/entries", s.dimension));
  }
  if (j.contains("weights")) {
    s.weights = numbers(j.at("weights"), path + "/weights");
    if (s.weights->size() != s.matrices.size()) schema_error(path + "/weights", "one weight per matrix required");
  }
  if (j.contains("cone")) s.cone = basis_rows(j.at("cone"), path + "/cone", s.dimension);
  return s;
}

SystemSpec parse_system(const std::string& text, const std::string& source) {
  return system_from_json(parse_json(text, source));
}

IfsSystem to_ifs(const SystemSpec& spec) {
  if (spec.dimension != 2) {
    throw Error(ErrorKind::InvalidInput, "this command needs 2x2 matrices (dimension 2)");
  }
  std::vector<Mat2> ms;
  for (const auto& m : spec.matrices) ms.push_back({m(0, 0), m(0, 1), m(1, 0), m(1, 1)});
  return IfsSystem(spec.labels, ms, spec.weights);
}

SimplicialCone cone_of(const SystemSpec& spec) {
  return spec.cone ? SimplicialCone(*spec.cone) : SimplicialCone::orthant(spec.dimension - 1);
}

Multicone parse_multicone(const std::string& text, const std::string& source) {
  const Json j = parse_json(text, source);
  only_keys(j, "", {"arcs"});
  const Json& arcs = member(j, "", "arcs");
  if (!arcs.is_array() || arcs.empty()) schema_error("/arcs", "expected a non-empty array");
  std::vector<Arc> out;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const std::string ap = "/arcs/" + std::to_string(i);
    only_keys(arcs[i], ap, {"start", "length"});
    out.push_back({number(member(arcs[i], ap, "start"), ap + "/start"),
                   number(member(arcs[i], ap, "length"), ap + "/length")});
  }
  return Multicone(out);
}

Json to_json(const Multicone& u) {
  Json arcs = Json::array();
  for (const auto& a : u.arcs()) arcs.push_back({{"start", a.start}, {"length", a.length}});
  return Json{{"arcs", arcs}};
}

MatrixFamily parse_family(const std::string& text, const std::string& source) {
  const Json j = parse_json(text, source);
  only_keys(j, "", {"base", "cone", "directions", "t_range"});
  const SystemSpec base = system_from_json(member(j, "", "base"), "/base");
  const int size = base.dimension;
  const SimplicialCone cone = j.contains("cone") ? SimplicialCone(basis_rows(j.at("cone"), "/cone", size))
                                                 : cone_of(base);
  std::optional<std::vector<Vec>> dirs;
  if (j.contains("directions")) {
    const Json& d = j.at("directions");
    if (!d.is_array() || d.size() != base.matrices.size()) {
      schema_error("/directions", "expected one vector per matrix");
    }
    dirs.emplace();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string dp = "/directions/" + std::to_string(i);
      const auto v = numbers(d[i], dp);
      if (v.size() != static_cast<std::size_t>(size)) schema_error(dp, "wrong vector length");
      dirs->push_back(Eigen::Map<const Vec>(v.data(), size));
    }
  }
  const auto range = numbers(member(j, "", "t_range"), "/t_range");
  if (range.size() != 2) schema_error("/t_range", "expected [lo, hi]");
  return make_family(base.labels, base.matrices, cone, dirs, range[0], range[1]);
}

Json to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const Word& w, const std::vector<std::string>& labels) {
  Json out = Json::array();
  for (auto s : w) out.push_back(labels.at(s));
  return out;
}

Json to_json(const InvarianceCertificate& c, const std::vector<std::string>& labels) {
  Json images = Json::array();
  for (const auto& im : c.images) {
    Json e{{"label", labels.at(im.label)},
           {"component", im.component},
           {"image", {{"start", im.image.start}, {"length", im.image.length}}},
           {"container", im.container ? Json(*im.container) : Json()},
           {"clearance", im.clearance}};
    images.push_back(e);
  }
  Json out{{"verdict", c.verified() ? "verified" : "refuted"}, {"margin", c.margin}, {"images", images}};
  if (c.offending) {
    out["offending"] = {{"label", labels.at(c.offending->first)}, {"component", c.offending->second}};
  }
  return out;
}

Json to_json(const EllipticSearch& e, const std::vector<std::string>& labels) {
  return Json{{"elliptic_word", e.elliptic ? to_json(*e.elliptic, labels) : Json()},
              {"parabolic_word", e.parabolic ? to_json(*e.parabolic, labels) : Json()},
              {"searched_length", e.searched_len}};
}

Json to_json(const DimensionReport& r) {
  Json samples = Json::array();
  for (const auto& [t, p] : r.pressure_samples) samples.push_back(Json::array({t, p}));
  auto opt = [](const std::optional<double>& x) { return x ? Json(*x) : Json(); };
  return Json{{"n", r.n},
              {"dim_estimate", r.dim_estimate},
              {"dim_dn_estimate", opt(r.dim_dn_estimate)},
              {"d_n", opt(r.d_n)},
              {"s_estimate", r.s_estimate},
              {"s_a_estimate", r.s_a_estimate},
              {"q_n", opt(r.q_n)},
              {"bracket", r.bracket ? Json::array({r.bracket->first, r.bracket->second}) : Json()},
              {"constants",
               {{"r1", r.constants.r1},
                {"lambda", r.constants.lambda},
                {"c", r.constants.c},
                {"c_hyp", r.constants.c_hyp},
                {"c_distortion", r.constants.c_distortion}}},
              {"total_length", r.total_length},
              {"margin", r.margin},
              {"n0", r.n0 ? Json(*r.n0) : Json()},
              {"pressure_samples", samples},
              {"notes", r.notes}};
}

Json to_json(const FurstenbergDimension& f) {
  auto est = [](const Estimate& e) { return Json{{"value", e.value}, {"se", e.se}}; };
  return Json{{"entropy", f.entropy},
              {"chi_a", est(f.chi_a)},
              {"dimension", f.dimension},
              {"chi_phi", f.chi_phi ? est(*f.chi_phi) : Json()},
              {"dimension_phi", f.dimension_phi ? Json(*f.dimension_phi) : Json()},
              {"disagreement", f.disagreement},
              {"notes", f.notes}};
}

Json to_json(const SeparationProfile& p, const std::vector<std::string>& labels) {
  auto pair = [&](const std::optional<WordPair>& w) {
    return w ? Json::array({to_json(w->first, labels), to_json(w->second, labels)}) : Json();
  };
  Json coll = Json::array();
  for (const auto& c : p.collisions) coll.push_back(Json::array({to_json(c.first, labels), to_json(c.second, labels)}));
  return Json{{"n", p.n},
              {"words", p.words},
              {"min_gap_strong", p.min_gap_strong},
              {"min_gap_weak", p.min_gap_weak},
              {"c_n", p.c_n ? Json(*p.c_n) : Json()},
              {"witness", pair(p.witness)},
              {"witness_weak", pair(p.witness_weak)},
              {"collision_count", p.collision_count},
              {"collisions", coll},
              {"exact", p.exact}};
}

Json to_json(const ConeMapReport& r) {
  return Json{{"invariant", r.invariant},
              {"coordinates", to_json(r.coordinates)},
              {"hilbert_diameter", r.hilbert_diameter},
              {"birkhoff_coefficient", r.birkhoff_coefficient}};
}

Json to_json(const ConeContraction& c) {
  return Json{{"c", c.c},
              {"gamma", c.gamma},
              {"contracting", c.contracting},
              {"max_birkhoff", c.max_birkhoff},
              {"max_derivative", c.max_derivative}};
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace hypercone
