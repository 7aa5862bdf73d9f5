#include "srr/channels.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "srr/linalg.hpp"

namespace srr {

using nlohmann::json;

ChannelSet generate_channels(std::uint64_t seed, int n_t,
                             const std::vector<int>& n_r) {
  if (n_t <= 0 || n_r.empty())
    throw DomainError("generate_channels: dimensions must be positive");
  for (int r : n_r)
    if (r <= 0)
      throw DomainError("generate_channels: dimensions must be positive");
  Mt64 gen(seed);
  ChannelSet ch;
  ch.n_t = n_t;
  ch.rx.reserve(n_r.size());
  for (int r : n_r) {
    CMat h(r, n_t);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < n_t; ++j) h(i, j) = gen.cgauss_unit();
    ch.rx.push_back(std::move(h));
  }
  ch.check();
  return ch;
}

namespace {

json mat_to_json(const CMat& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rrow = json::array(), irow = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

CMat mat_from_json(const json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (!re.is_array() || re.empty() || re.size() != im.size())
    throw DomainError("matrix JSON: re/im shape mismatch");
  const std::size_t rows = re.size(), cols = re[0].size();
  CMat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (re[i].size() != cols || im[i].size() != cols)
      throw DomainError("matrix JSON: ragged rows");
    for (std::size_t j = 0; j < cols; ++j)
      m(i, j) = Cplx(re[i][j].get<double>(), im[i][j].get<double>());
  }
  return m;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot open " + tmp + " for writing");
    out << content;
    if (!out) throw DomainError("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw DomainError("cannot move " + tmp + " into place");
}

void save_channels(const ChannelSet& ch, const std::string& path,
                   std::uint64_t seed) {
  ch.check();
  json j;
  j["N_t"] = ch.n_t;
  j["K"] = ch.users();
  json nr = json::array();
  for (int k = 0; k < ch.users(); ++k) nr.push_back(ch.n_r(k));
  j["N_r"] = std::move(nr);
  j["seed"] = seed;
  json hs = json::array();
  for (const CMat& h : ch.rx) hs.push_back(mat_to_json(h));
  j["H"] = std::move(hs);
  write_text_atomic(path, j.dump(2) + "\n");
}

ChannelSet load_channels(const std::string& path, std::uint64_t* seed_out) {
  json j = read_json_file(path);
  ChannelSet ch;
  ch.n_t = j.at("N_t").get<int>();
  const auto& hs = j.at("H");
  for (const auto& hj : hs) ch.rx.push_back(mat_from_json(hj));
  if (j.contains("K") && j["K"].get<int>() != ch.users())
    throw DomainError("channel file: K disagrees with the matrix count");
  if (j.contains("N_r")) {
    const auto& nr = j["N_r"];
    if (static_cast<int>(nr.size()) != ch.users())
      throw DomainError("channel file: N_r length disagrees");
    for (int k = 0; k < ch.users(); ++k)
      if (nr[k].get<int>() != ch.n_r(k))
        throw DomainError("channel file: N_r disagrees with matrix shapes");
  }
  if (seed_out) *seed_out = j.value("seed", std::uint64_t{0});
  ch.check();
  return ch;
}

void save_covariances(const CovarianceTriple& cov, const std::string& path) {
  json j;
  j["N_t"] = static_cast<int>(cov.multicast.rows());
  j["P"] = cov.power;
  j["Q0"] = mat_to_json(cov.multicast);
  j["Qc"] = mat_to_json(cov.confidential);
  j["Qa"] = mat_to_json(cov.noise);
  write_text_atomic(path, j.dump(2) + "\n");
}

CovarianceTriple load_covariances(const std::string& path) {
  json j = read_json_file(path);
  CovarianceTriple cov;
  cov.power = j.at("P").get<double>();
  cov.multicast = mat_from_json(j.at("Q0"));
  cov.confidential = mat_from_json(j.at("Qc"));
  cov.noise = mat_from_json(j.at("Qa"));
  const int nt = j.at("N_t").get<int>();
  if (cov.multicast.rows() != nt || cov.confidential.rows() != nt ||
      cov.noise.rows() != nt)
    throw DomainError("covariance file: N_t disagrees with matrix shapes");
  return cov;
}

}  // namespace srr
