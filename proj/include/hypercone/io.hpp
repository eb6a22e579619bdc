#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypercone/cone_nd.hpp"
#include "hypercone/family.hpp"
#include "hypercone/ifs_core.hpp"
#include "hypercone/multicone.hpp"
#include "hypercone/separation.hpp"
#include "hypercone/stochastic.hpp"
#include "hypercone/thermo.hpp"

namespace hypercone {

using Json = nlohmann::ordered_json;

/// Parsed system file:
///   {"dimension": 2, "matrices": [{"label": "1", "entries": [[a, b], [c, d]]}],
///    "weights": [p1, ...], "cone": [[v1...], [v2...], ...]}
/// "weights" and "cone" are optional; cone rows are the basis vectors.
struct SystemSpec {
  int dimension = 2;
  std::vector<std::string> labels;
  std::vector<Mat> matrices;
  std::optional<std::vector<double>> weights;
  std::optional<Mat> cone;  // basis vectors as columns
};

std::string read_text_file(const std::string& path);

/// Syntax errors report line and column; schema errors a JSON pointer path.
Json parse_json(const std::string& text, const std::string& source = "<input>");

SystemSpec system_from_json(const Json& j, const std::string& path = "");
SystemSpec parse_system(const std::string& text, const std::string& source = "<input>");
/// Requires dimension 2.
IfsSystem to_ifs(const SystemSpec& spec);
SimplicialCone cone_of(const SystemSpec& spec);

/// {"arcs": [{"start": theta, "length": l}, ...]}
Multicone parse_multicone(const std::string& text, const std::string& source = "<input>");
Json to_json(const Multicone& u);

/// {"base": system, "cone": [[...]], "directions": [[...]], "t_range": [lo, hi]}
MatrixFamily parse_family(const std::string& text, const std::string& source = "<input>");

Json to_json(const Mat& m);
Json to_json(const Vec& v);
Json to_json(const Word& w, const std::vector<std::string>& labels);
Json to_json(const InvarianceCertificate& c, const std::vector<std::string>& labels);
Json to_json(const EllipticSearch& e, const std::vector<std::string>& labels);
Json to_json(const DimensionReport& r);
Json to_json(const FurstenbergDimension& f);
Json to_json(const SeparationProfile& p, const std::vector<std::string>& labels);
Json to_json(const ConeMapReport& r);
Json to_json(const ConeContraction& c);

/// Shortest round-trip text; JSON output writes +-infinity and NaN as null.
std::string dump_json(const Json& j);

/// %.17g; "inf", "-inf", "nan" for non-finite values.
std::string csv_number(double x);
/// RFC 4180 quoting when needed.
std::string csv_field(const std::string& s);

}  // namespace hypercone
