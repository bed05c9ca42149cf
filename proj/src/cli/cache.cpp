#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>
#include <unistd.h>

#include "quelab/cli.hpp"
#include "quelab/errors.hpp"

namespace quelab::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

fs::path resolve_cache_dir(const fs::path& fallback) {
  if (const char* env = std::getenv("QUELAB_CACHE_DIR"); env && *env) return env;
  return fallback;
}

Cache::Cache(fs::path dir) : dir_(std::move(dir)) {}

fs::path Cache::entry_path(int k, int ncoeffs, int bits) const {
  return dir_ / ("k" + std::to_string(k) + "_n" + std::to_string(ncoeffs) + "_b" + std::to_string(bits) + "_v" +
                 std::to_string(kSchemaVersion) + ".json");
}

namespace {

json payload_of(const verify::WeightData& d) {
  json p;
  p["weight"] = d.basis.weight;
  p["ncoeffs"] = d.ncoeffs;
  p["working_bits"] = d.basis.working_bits;
  json cp = json::array();
  for (const auto& c : d.basis.t2_charpoly) cp.push_back(c.get_str());
  p["t2_charpoly"] = cp;
  json forms = json::array();
  for (size_t i = 0; i < d.basis.forms.size(); ++i) {
    const auto& f = d.basis.forms[i];
    const auto& pr = d.profiles[i];
    json jf;
    jf["index"] = f.index;
    jf["precision_bits"] = f.precision_bits;
    jf["t2_eigenvalue"] = to_decimal(f.t2_eigenvalue);
    json lam = json::array();
    for (int n = 1; n <= f.ncoeffs; ++n) lam.push_back(to_decimal(f(n)));
    jf["lambda"] = lam;
    jf["log_norm_sq"] = to_decimal(pr.norm_sq.logmag());
    jf["scaled_norm"] = to_decimal(pr.scaled_norm);
    jf["sym2_l"] = to_decimal(pr.sym2_l);
    jf["sym2_r"] = to_decimal(pr.sym2_r);
    jf["quad_error"] = pr.quad_error;
    forms.push_back(jf);
  }
  p["forms"] = forms;
  return p;
}

verify::WeightData from_payload(const json& p, int bits) {
  verify::WeightData d;
  d.ncoeffs = p.at("ncoeffs").get<int>();
  d.basis.weight = p.at("weight").get<int>();
  d.basis.working_bits = p.at("working_bits").get<int>();
  for (const auto& c : p.at("t2_charpoly")) d.basis.t2_charpoly.emplace_back(c.get<std::string>());
  for (const auto& jf : p.at("forms")) {
    eigenforms::Eigenform f;
    f.weight = d.basis.weight;
    f.index = jf.at("index").get<int>();
    f.precision_bits = jf.at("precision_bits").get<int>();
    f.ncoeffs = d.ncoeffs;
    f.t2_eigenvalue = from_decimal(jf.at("t2_eigenvalue").get<std::string>(), f.precision_bits);
    const auto& lam = jf.at("lambda");
    if (static_cast<int>(lam.size()) != d.ncoeffs) throw CorruptEntry("coefficient count mismatch");
    f.lambda.assign(static_cast<size_t>(d.ncoeffs) + 1, Real(0));
    for (int n = 1; n <= d.ncoeffs; ++n) f.lambda[n] = from_decimal(lam[n - 1].get<std::string>(), f.precision_bits);
    verify::MassProfile pr;
    pr.weight = f.weight;
    pr.index = f.index;
    pr.norm_sq = specfun::LogReal::from_log(from_decimal(jf.at("log_norm_sq").get<std::string>(), bits));
    pr.scaled_norm = from_decimal(jf.at("scaled_norm").get<std::string>(), bits);
    pr.sym2_l = from_decimal(jf.at("sym2_l").get<std::string>(), bits);
    pr.sym2_r = from_decimal(jf.at("sym2_r").get<std::string>(), bits);
    pr.quad_error = jf.at("quad_error").get<double>();
    d.basis.forms.push_back(std::move(f));
    d.profiles.push_back(pr);
  }
  return d;
}

}  // namespace

std::optional<verify::WeightData> Cache::get(int k, int ncoeffs, int bits) const {
  const fs::path path = entry_path(k, ncoeffs, bits);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    json doc = json::parse(ss.str());
    const json& key = doc.at("key");
    if (key.at("schema_version").get<int>() != kSchemaVersion) return std::nullopt;
    if (key.at("k").get<int>() != k || key.at("ncoeffs").get<int>() != ncoeffs ||
        key.at("precision_bits").get<int>() != bits)
      throw CorruptEntry("key does not match file name");
    const json& payload = doc.at("payload");
    if (sha256_hex(payload.dump()) != doc.at("digest").get<std::string>()) throw CorruptEntry("digest mismatch");
    WorkingPrecision wp(bits);
    return from_payload(payload, bits);
  } catch (const CorruptEntry& e) {
    throw CorruptEntry(path.string() + ": " + e.what());
  } catch (const std::exception& e) {
    throw CorruptEntry(path.string() + ": " + e.what());
  }
}

void Cache::put(const verify::WeightData& data, int bits) const {
  fs::create_directories(dir_);
  json doc;
  doc["key"] = {{"k", data.basis.weight},
                {"ncoeffs", data.ncoeffs},
                {"precision_bits", bits},
                {"schema_version", kSchemaVersion}};
  json payload = payload_of(data);
  doc["digest"] = sha256_hex(payload.dump());
  doc["payload"] = std::move(payload);
  const fs::path target = entry_path(data.basis.weight, data.ncoeffs, bits);
  std::random_device rd;
  const fs::path tmp =
      dir_ / (".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(rd()) + "-" + target.filename().string());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << doc.dump();
    out.flush();
    if (!out) throw Error("cannot write cache file " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::optional<verify::WeightData> Cache::load(int k, int ncoeffs, int bits) {
  try {
    auto d = get(k, ncoeffs, bits);
    if (d) ++hits_;
    return d;
  } catch (const CorruptEntry& e) {
    warnings_.push_back(std::string("corrupt cache entry ignored, recomputing: ") + e.what());
    return std::nullopt;
  }
}

void Cache::save(const verify::WeightData& data, int bits) {
  try {
    put(data, bits);
  } catch (const std::exception& e) {
    warnings_.push_back(std::string("cache write failed: ") + e.what());
  }
}

}  // namespace quelab::cli
