#pragma once

#include <string>

#include "json.hpp"
#include "ncbkw/extension.hpp"
#include "ncbkw/korovkin.hpp"

namespace ncbkw {

// Insertion-ordered so identical inputs serialize to identical bytes.
using Json = nlohmann::ordered_json;

// Parsers take the JSON path of the node for error messages; every
// failure throws ParseError naming that path. Complex numbers are
// [re, im] pairs, matrices are row-major entry lists.

Json load_json_file(const std::string& filename);

CMat parse_cmat(const Json& j, const std::string& path);
Json dump_cmat(const CMat& a);

// One of {"kraus": [CMat,...]}, {"choi": CMat, "in_dim": n,
// "out_dim": m}, {"conjugation": {"T": CMat, "lambda": x}}.
CPMap parse_mapspec(const Json& j, const std::string& path);
Json dump_cpmap(const CPMap& m);  // choi form

struct SystemSpec {
  int ambient_dim = 0;
  std::vector<CMat> generators;
};
SystemSpec parse_system(const Json& j, const std::string& path);
Json dump_system(const OperatorSystem& s);
Json dump_algebra(const StarAlgebra& a);

ExtensionProblem parse_extension(const Json& j, const std::string& path);
PopaProblem parse_popa(const Json& j, const std::string& path);
HyperrigidityProblem parse_hyperrigid(const Json& j,
                                      const std::string& path);

// Diagnostic dump/reload of raw PSD sections for reproduction.
AffinePSDProblem parse_sdp(const Json& j, const std::string& path);
Json dump_sdp(const AffinePSDProblem& p);

Json dump_certificate(const std::optional<FarkasCertificate>& c);
Json dump_extension_report(const UniquenessReport& r,
                           const ExtensionProblem& p);
Json dump_bkw_report(const BkwReport& r);
Json dump_spread_report(const SpreadReport& r);
Json dump_popa_report(const PopaReport& r);
Json dump_hyperrigidity_report(const HyperrigidityReport& r);

}  // namespace ncbkw
