#include "ncbkw/json_io.hpp"

#include <fstream>

namespace ncbkw {

namespace {

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end())
    throw ParseError(path + "." + key + ": missing required field");
  return *it;
}

int int_field(const Json& j, const char* key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_number_integer())
    throw ParseError(path + "." + key + ": expected an integer");
  return v.get<int>();
}

double num_at(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path + ": expected a number");
  return v.get<double>();
}

Json dump_complex(cd z) { return Json::array({z.real(), z.imag()}); }

}  // namespace

Json load_json_file(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw ParseError("cannot open input file: " + filename);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(filename + ": " + e.what());
  }
}

CMat parse_cmat(const Json& j, const std::string& path) {
  int rows = int_field(j, "rows", path);
  int cols = int_field(j, "cols", path);
  if (rows <= 0 || cols <= 0)
    throw ParseError(path + ": rows and cols must be positive");
  const Json& entries = field(j, "entries", path);
  if (!entries.is_array() ||
      entries.size() != std::size_t(rows) * std::size_t(cols))
    throw ParseError(path + ".entries: expected " +
                     std::to_string(rows * cols) + " [re, im] pairs");
  CMat a(rows, cols);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Json& e = entries[k];
    std::string epath = path + ".entries[" + std::to_string(k) + "]";
    if (!e.is_array() || e.size() != 2)
      throw ParseError(epath + ": expected a [re, im] pair");
    a(Eigen::Index(k) / cols, Eigen::Index(k) % cols) =
        cd(num_at(e[0], epath + "[0]"), num_at(e[1], epath + "[1]"));
  }
  return a;
}

Json dump_cmat(const CMat& a) {
  Json entries = Json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      entries.push_back(dump_complex(a(r, c)));
  return Json{{"rows", a.rows()}, {"cols", a.cols()}, {"entries", entries}};
}

CPMap parse_mapspec(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path + ": expected a map spec");
  try {
    if (j.contains("kraus")) {
      const Json& arr = j["kraus"];
      if (!arr.is_array() || arr.empty())
        throw ParseError(path + ".kraus: expected a non-empty array");
      std::vector<CMat> kraus;
      for (std::size_t k = 0; k < arr.size(); ++k)
        kraus.push_back(
            parse_cmat(arr[k], path + ".kraus[" + std::to_string(k) + "]"));
      return CPMap::from_kraus(kraus);
    }
    if (j.contains("choi")) {
      CMat c = parse_cmat(j["choi"], path + ".choi");
      return CPMap::from_choi(c, int_field(j, "in_dim", path),
                              int_field(j, "out_dim", path));
    }
    if (j.contains("conjugation")) {
      const Json& spec = j["conjugation"];
      ConjugationSpec cs;
      cs.t = parse_cmat(field(spec, "T", path + ".conjugation"),
                        path + ".conjugation.T");
      cs.lambda = spec.contains("lambda")
                      ? num_at(spec["lambda"], path + ".conjugation.lambda")
                      : 1.0;
      return CPMap::from_conjugation(cs);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path + ": " + e.what());
  }
  throw ParseError(path +
                   ": expected one of \"kraus\", \"choi\", \"conjugation\"");
}

Json dump_cpmap(const CPMap& m) {
  return Json{{"choi", dump_cmat(m.choi())},
              {"in_dim", m.in_dim()},
              {"out_dim", m.out_dim()}};
}

SystemSpec parse_system(const Json& j, const std::string& path) {
  SystemSpec spec;
  spec.ambient_dim = int_field(j, "ambient_dim", path);
  if (spec.ambient_dim <= 0)
    throw ParseError(path + ".ambient_dim: must be positive");
  const Json& gens = field(j, "generators", path);
  if (!gens.is_array())
    throw ParseError(path + ".generators: expected an array");
  for (std::size_t k = 0; k < gens.size(); ++k) {
    std::string gpath = path + ".generators[" + std::to_string(k) + "]";
    CMat g = parse_cmat(gens[k], gpath);
    if (g.rows() != spec.ambient_dim || g.cols() != spec.ambient_dim)
      throw ParseError(gpath + ": expected " +
                       std::to_string(spec.ambient_dim) + "x" +
                       std::to_string(spec.ambient_dim));
    spec.generators.push_back(std::move(g));
  }
  return spec;
}

Json dump_system(const OperatorSystem& s) {
  Json basis = Json::array();
  for (const CMat& b : s.basis) basis.push_back(dump_cmat(b));
  return Json{{"dim", s.dim()}, {"basis", basis}};
}

Json dump_algebra(const StarAlgebra& a) {
  Json basis = Json::array();
  for (const CMat& b : a.basis) basis.push_back(dump_cmat(b));
  return Json{{"dim", a.dim()}, {"basis", basis}};
}

ExtensionProblem parse_extension(const Json& j, const std::string& path) {
  SystemSpec sys = parse_system(field(j, "system", path), path + ".system");
  int out_dim = int_field(j, "out_dim", path);
  if (out_dim <= 0) throw ParseError(path + ".out_dim: must be positive");
  const Json& tj = field(j, "targets", path);
  if (!tj.is_array() || tj.size() != sys.generators.size())
    throw ParseError(path + ".targets: expected one target per generator (" +
                     std::to_string(sys.generators.size()) + ")");
  std::vector<CMat> targets;
  for (std::size_t k = 0; k < tj.size(); ++k) {
    std::string tpath = path + ".targets[" + std::to_string(k) + "]";
    CMat t = parse_cmat(tj[k], tpath);
    if (t.rows() != out_dim || t.cols() != out_dim)
      throw ParseError(tpath + ": expected " + std::to_string(out_dim) + "x" +
                       std::to_string(out_dim));
    targets.push_back(std::move(t));
  }
  bool unital = true;
  if (j.contains("unital")) {
    if (!j["unital"].is_boolean())
      throw ParseError(path + ".unital: expected a boolean");
    unital = j["unital"].get<bool>();
  }
  return make_extension_problem(sys.ambient_dim, sys.generators, targets,
                                out_dim, unital);
}

PopaProblem parse_popa(const Json& j, const std::string& path) {
  int n = int_field(j, "ambient_dim", path);
  if (n <= 0) throw ParseError(path + ".ambient_dim: must be positive");
  CMat a = parse_cmat(field(j, "a", path), path + ".a");
  if (a.rows() != n || a.cols() != n)
    throw ParseError(path + ".a: expected " + std::to_string(n) + "x" +
                     std::to_string(n));
  CPMap phi = parse_mapspec(field(j, "phi", path), path + ".phi");
  if (phi.in_dim() != n)
    throw ParseError(path + ".phi: domain dimension must equal ambient_dim");
  const Json& sj = field(j, "sequence", path);
  if (!sj.is_array()) throw ParseError(path + ".sequence: expected an array");
  std::vector<CPMap> sequence;
  for (std::size_t k = 0; k < sj.size(); ++k)
    sequence.push_back(
        parse_mapspec(sj[k], path + ".sequence[" + std::to_string(k) + "]"));
  return make_popa_problem(phi, a, std::move(sequence));
}

HyperrigidityProblem parse_hyperrigid(const Json& j,
                                      const std::string& path) {
  const Json& bj = field(j, "blocks", path);
  if (!bj.is_array() || bj.empty())
    throw ParseError(path + ".blocks: expected a non-empty array of sizes");
  std::vector<int> blocks;
  int total = 0;
  for (std::size_t k = 0; k < bj.size(); ++k) {
    std::string bpath = path + ".blocks[" + std::to_string(k) + "]";
    if (!bj[k].is_number_integer() || bj[k].get<int>() <= 0)
      throw ParseError(bpath + ": expected a positive integer");
    blocks.push_back(bj[k].get<int>());
    total += blocks.back();
  }
  const Json& sj = field(j, "S", path);
  if (!sj.is_array()) throw ParseError(path + ".S: expected an array");
  std::vector<CMat> gens;
  for (std::size_t k = 0; k < sj.size(); ++k)
    gens.push_back(parse_cmat(sj[k], path + ".S[" + std::to_string(k) + "]"));
  CPMap eta = j.contains("eta") ? parse_mapspec(j["eta"], path + ".eta")
                                : CPMap::identity(total);
  std::vector<std::vector<int>> family;
  if (j.contains("family")) {
    const Json& fj = j["family"];
    if (!fj.is_array())
      throw ParseError(path + ".family: expected an array of vectors");
    for (std::size_t k = 0; k < fj.size(); ++k) {
      std::string fpath = path + ".family[" + std::to_string(k) + "]";
      if (!fj[k].is_array()) throw ParseError(fpath + ": expected an array");
      std::vector<int> mults;
      for (std::size_t l = 0; l < fj[k].size(); ++l) {
        if (!fj[k][l].is_number_integer())
          throw ParseError(fpath + "[" + std::to_string(l) +
                           "]: expected an integer");
        mults.push_back(fj[k][l].get<int>());
      }
      family.push_back(std::move(mults));
    }
  }
  return make_hyperrigidity_problem(blocks, gens, eta, std::move(family));
}

AffinePSDProblem parse_sdp(const Json& j, const std::string& path) {
  int dim = int_field(j, "dim", path);
  if (dim <= 0) throw ParseError(path + ".dim: must be positive");
  AffinePSDProblem p(dim);
  const Json& cj = field(j, "constraints", path);
  if (!cj.is_array())
    throw ParseError(path + ".constraints: expected an array");
  for (std::size_t k = 0; k < cj.size(); ++k) {
    std::string cpath = path + ".constraints[" + std::to_string(k) + "]";
    CMat a = parse_cmat(field(cj[k], "A", cpath), cpath + ".A");
    if (a.rows() != dim || a.cols() != dim)
      throw ParseError(cpath + ".A: expected " + std::to_string(dim) + "x" +
                       std::to_string(dim));
    p.add_constraint(a, num_at(field(cj[k], "b", cpath), cpath + ".b"));
  }
  if (j.contains("objective"))
    p.set_objective(parse_cmat(j["objective"], path + ".objective"));
  return p;
}

Json dump_sdp(const AffinePSDProblem& p) {
  Json constraints = Json::array();
  for (Eigen::Index l = 0; l < p.n_constraints(); ++l)
    constraints.push_back(
        Json{{"A", dump_cmat(herm_from_coords(p.constraints.row(l), p.dim))},
             {"b", p.rhs(l)}});
  Json j{{"dim", p.dim}, {"constraints", constraints}};
  j["objective"] = p.objective
                       ? dump_cmat(herm_from_coords(*p.objective, p.dim))
                       : Json(nullptr);
  return j;
}

Json dump_certificate(const std::optional<FarkasCertificate>& c) {
  if (!c) return nullptr;
  Json y = Json::array();
  for (Eigen::Index i = 0; i < c->y.size(); ++i) y.push_back(c->y(i));
  return Json{{"y", y},
              {"lambda_max", c->lambda_max},
              {"b_dot_y", c->b_dot_y}};
}

namespace {

Json dump_residuals(const UniquenessReport& r, const ExtensionProblem& p) {
  if (r.choi_interior.size() == 0) return nullptr;
  CPMap base = CPMap::from_choi(r.choi_interior, p.in_dim, p.out_dim);
  return Json{{"affine", restriction_distance(p, base)},
              {"cone", std::max(0.0, -base.choi_min_eig())}};
}

Json dump_opt_choi(const std::optional<CMat>& c, int in_dim, int out_dim) {
  if (!c) return nullptr;
  return Json{
      {"choi", dump_cmat(*c)}, {"in_dim", in_dim}, {"out_dim", out_dim}};
}

}  // namespace

Json dump_extension_report(const UniquenessReport& r,
                           const ExtensionProblem& p) {
  Json j;
  j["status"] = to_string(r.verdict);
  j["null_dim"] = r.null_dim;
  j["support_rank"] = r.support_rank;
  j["iterations"] = r.iterations;
  j["base_point"] = r.choi_interior.size() > 0
                        ? Json{{"choi", dump_cmat(r.choi_interior)},
                               {"in_dim", p.in_dim},
                               {"out_dim", p.out_dim}}
                        : Json(nullptr);
  j["second_extension"] = dump_opt_choi(r.second_choi, p.in_dim, p.out_dim);
  j["second_distance"] = r.second_distance;
  j["residuals"] = dump_residuals(r, p);
  j["certificate"] = dump_certificate(r.certificate);
  j["detail"] = r.detail;
  return j;
}

Json dump_bkw_report(const BkwReport& r) {
  const int n = r.algebra.ambient_dim;
  const int m = r.base.choi_interior.size() > 0
                    ? int(r.base.choi_interior.rows()) / std::max(n, 1)
                    : 0;
  Json j;
  j["status"] = to_string(r.uniqueness);
  j["bkw"] = r.rigid;
  j["algebra_status"] = to_string(r.algebra_uniqueness);
  j["null_dim"] = r.null_dim;
  j["algebra_null_dim"] = r.algebra_null_dim;
  j["algebra_dim"] = r.algebra.dim();
  j["support_rank"] = r.base.support_rank;
  j["iterations"] = r.base.iterations;
  j["base_point"] = r.base.choi_interior.size() > 0
                        ? Json{{"choi", dump_cmat(r.base.choi_interior)},
                               {"in_dim", n},
                               {"out_dim", m}}
                        : Json(nullptr);
  j["second_extension"] = dump_opt_choi(r.base.second_choi, n, m);
  j["second_distance"] = r.base.second_distance;
  j["algebra_second"] = dump_opt_choi(r.algebra_second_choi, n, m);
  j["algebra_distance"] = r.algebra_distance;
  j["certificate"] = dump_certificate(r.base.certificate);
  j["detail"] = r.base.detail;
  return j;
}

Json dump_spread_report(const SpreadReport& r) {
  Json gaps = Json::array();
  for (double g : r.gaps) gaps.push_back(g);
  return Json{{"spread", r.spread},
              {"gaps", gaps},
              {"decided", r.decided},
              {"iterations", r.iterations}};
}

Json dump_popa_report(const PopaReport& r) {
  auto arr = [](const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
  };
  Json failures = Json::array();
  for (std::size_t i : r.schwarz_failures) failures.push_back(i);
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["margin"] = r.conditions.margin;
  j["residual_left"] = r.conditions.residual_left;
  j["residual_right"] = r.conditions.residual_right;
  j["kappa"] = r.kappa;
  j["kappa_inequality"] = r.kappa_inequality;
  j["premise_slope"] = r.premise_slope;
  j["conclusion_slope"] = r.conclusion_slope;
  j["premise_distances"] = arr(r.premise_distances);
  j["conclusion_distances"] = arr(r.conclusion_distances);
  j["rescaled_distances"] = arr(r.rescaled_distances);
  j["schwarz_failures"] = failures;
  return j;
}

Json dump_hyperrigidity_report(const HyperrigidityReport& r) {
  Json members = Json::array();
  for (const HyperrigidityMember& m : r.members) {
    Json mults = Json::array();
    for (int v : m.mults) mults.push_back(v);
    Json mj;
    mj["mults"] = mults;
    mj["status"] = to_string(m.verdict);
    mj["support_rank"] = m.support_rank;
    mj["null_dim"] = m.null_dim;
    mj["iterations"] = m.iterations;
    mj["witness"] = m.witness ? dump_cpmap(*m.witness) : Json(nullptr);
    mj["witness_distance"] = m.witness_distance;
    mj["detail"] = m.detail;
    members.push_back(std::move(mj));
  }
  return Json{{"decided", r.decided},
              {"hyperrigid_on_family", r.hyperrigid_on_family},
              {"refuted", r.refuted},
              {"members", members}};
}

}  // namespace ncbkw
