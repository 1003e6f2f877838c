#include <chrono>
#include <cmath>
#include <iostream>

#include <httplib.h>
#include <json.hpp>

#include "qmsvm/sampler.hpp"

namespace qmsvm {

namespace {

struct Endpoint {
  std::string base;  // scheme://host:port
  std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("remote: endpoint '" + url + "' has no scheme");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

void report(std::vector<std::string>* warnings, const std::string& msg) {
  if (warnings)
    warnings->push_back(msg);
  else
    std::cerr << "qmsvm: warning: " << msg << '\n';
}

}  // namespace

SampleSet solve_remote(const QuboProblem& q, const RemoteConfig& cfg,
                       std::uint64_t num_reads,
                       std::vector<std::string>* warnings) {
  if (num_reads < 1) throw ConfigError("remote: num_reads must be >= 1");
  if (!(cfg.timeout_seconds > 0.0))
    throw ConfigError("remote: timeout must be positive");

  nlohmann::json request;
  request["dim"] = q.dim();
  auto& entries = request["entries"] = nlohmann::json::array();
  for (const auto& [i, j, v] : q.entries())
    entries.push_back({i, j, v});
  request["num_reads"] = num_reads;
  request["passthrough"] = nlohmann::json::object();
  for (const auto& [k, v] : cfg.passthrough) request["passthrough"][k] = v;

  const Endpoint ep = parse_endpoint(cfg.endpoint);
  httplib::Client client(ep.base);
  const auto usec = std::chrono::microseconds(
      static_cast<std::int64_t>(cfg.timeout_seconds * 1e6));
  client.set_connection_timeout(usec);
  client.set_read_timeout(usec);
  client.set_write_timeout(usec);

  const auto res = client.Post(ep.path, request.dump(), "application/json");
  if (!res)
    throw SamplerError("remote: transport failure contacting " +
                       cfg.endpoint + " (" + httplib::to_string(res.error()) +
                       ")");
  if (res->status < 200 || res->status >= 300)
    throw SamplerError("remote: HTTP " + std::to_string(res->status) +
                       " from " + cfg.endpoint);

  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw SamplerError(std::string("remote: malformed JSON response: ") +
                       e.what());
  }

  if (!body.contains("samples") || !body["samples"].is_array())
    throw SamplerError("remote: response missing 'samples' array");

  SampleSet out;
  std::vector<Sample> samples;
  for (const auto& item : body["samples"]) {
    if (!item.is_object() || !item.contains("bits") ||
        !item["bits"].is_array())
      throw SamplerError("remote: sample missing 'bits' array");
    const auto& jb = item["bits"];
    if (jb.size() != q.dim())
      throw SamplerError("remote: sample has " + std::to_string(jb.size()) +
                         " bits for dim " + std::to_string(q.dim()));
    Sample s;
    s.bits.resize(jb.size());
    for (std::size_t i = 0; i < jb.size(); ++i) {
      if (!jb[i].is_number_integer())
        throw SamplerError("remote: non-integer bit in sample");
      const auto bit = jb[i].get<int>();
      if (bit != 0 && bit != 1)
        throw SamplerError("remote: bit value " + std::to_string(bit) +
                           " outside {0, 1}");
      s.bits[i] = static_cast<std::uint8_t>(bit);
    }
    s.occurrences = 1;
    if (item.contains("occurrences")) {
      if (!item["occurrences"].is_number_integer() ||
          item["occurrences"].get<std::int64_t>() < 1)
        throw SamplerError("remote: bad occurrence count");
      s.occurrences = item["occurrences"].get<std::uint64_t>();
    }
    const double local = energy(q, s.bits);
    if (item.contains("energy") && item["energy"].is_number()) {
      const double remote_e = item["energy"].get<double>();
      const double tol = 1e-6 * std::max(1.0, std::fabs(local));
      if (std::fabs(remote_e - local) > tol)
        report(warnings, "remote energy " + format_double(remote_e) +
                             " disagrees with local " + format_double(local) +
                             "; keeping local value");
    }
    s.energy = local;
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw SamplerError("remote: response has no samples");

  // merge duplicates, then order by (energy, bits)
  std::sort(samples.begin(), samples.end(),
            [](const Sample& a, const Sample& b) { return a.bits < b.bits; });
  for (auto& s : samples) {
    if (!out.samples.empty() && out.samples.back().bits == s.bits)
      out.samples.back().occurrences += s.occurrences;
    else
      out.samples.push_back(std::move(s));
  }
  std::stable_sort(out.samples.begin(), out.samples.end(),
                   [](const Sample& a, const Sample& b) {
                     if (a.energy != b.energy) return a.energy < b.energy;
                     return a.bits < b.bits;
                   });
  for (const auto& s : out.samples) out.num_reads += s.occurrences;
  return out;
}

}  // namespace qmsvm
