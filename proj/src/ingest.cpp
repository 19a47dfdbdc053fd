#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "gap/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <future>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "gap/error.hpp"
#include "gap/raster.hpp"

namespace gap::ingest {

namespace {

std::optional<std::string> optional_text(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) return std::nullopt;
  return it->get<std::string>();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

MetObjectRecord parse_object(std::string_view json_body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_body);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("object response is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("objectID") || !j["objectID"].is_number_integer() ||
      j["objectID"].get<long>() <= 0)
    throw SchemaError("object response lacks a positive integer objectID");
  MetObjectRecord r;
  r.object_id = j["objectID"].get<long>();
  r.title = optional_text(j, "title").value_or("");
  r.is_public_domain = j.value("isPublicDomain", false);
  r.primary_image_url = optional_text(j, "primaryImage").value_or("");
  r.artist = optional_text(j, "artistDisplayName");
  r.date = optional_text(j, "objectDate");
  r.department = optional_text(j, "department");
  r.culture = optional_text(j, "culture");
  r.medium = optional_text(j, "medium");
  r.dimensions = optional_text(j, "dimensions");
  return r;
}

bool accept(const MetObjectRecord& record) {
  return record.is_public_domain && !record.primary_image_url.empty() &&
         lower(record.title).find("fragment") == std::string::npos;
}

HttpResponse HttpTransport::get(const std::string& url) {
  // scheme://host[:port] and the rest
  const auto scheme_end = url.find("://");
  const auto path_start = scheme_end == std::string::npos ? std::string::npos : url.find('/', scheme_end + 3);
  const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
  HttpResponse out;
  try {
    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    auto res = client.Get(path);
    if (!res) return out;
    out.status = res->status;
    out.body = std::move(res->body);
  } catch (const std::exception&) {
    out.status = 0;
  }
  return out;
}

std::string base_url_from_env() {
  const char* env = std::getenv(kBaseUrlEnv);
  return env && *env ? std::string(env) : std::string(kDefaultBaseUrl);
}

std::string object_url(const std::string& base_url, long object_id) {
  std::string base = base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  return base + "/public/collection/v1/objects/" + std::to_string(object_id);
}

HttpResponse get_with_retry(Transport& transport, const std::string& url, const RetryPolicy& retry) {
  auto delay = retry.base_delay;
  HttpResponse res;
  for (int attempt = 1; attempt <= std::max(1, retry.max_tries); ++attempt) {
    res = transport.get(url);
    if (res.status == 200) return res;
    const bool transient = res.status == 0 || res.status == 429 || res.status >= 500;
    if (!transient || attempt == retry.max_tries) break;
    std::this_thread::sleep_for(delay);
    delay = std::chrono::milliseconds(static_cast<long>(delay.count() * retry.factor));
  }
  throw TransportError(url, res.status);
}

MetObjectRecord fetch_object(Transport& transport, const std::string& base_url, long object_id,
                             const RetryPolicy& retry) {
  if (object_id < 1) throw UsageError("object id must be >= 1");
  return parse_object(get_with_retry(transport, object_url(base_url, object_id), retry).body);
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

struct Outcome {
  enum Kind { kRejected, kFailed, kAccepted } kind = kFailed;
  MetObjectRecord record;
  std::string image;
  bool network_failure = false;
  std::string error;
};

Outcome process(Transport& transport, long id, const CollectConfig& config) {
  Outcome o;
  try {
    o.record = fetch_object(transport, config.base_url, id, config.retry);
    if (!accept(o.record)) {
      o.kind = Outcome::kRejected;
      return o;
    }
    o.image = get_with_retry(transport, o.record.primary_image_url, config.retry).body;
    o.kind = Outcome::kAccepted;
  } catch (const NetworkError& e) {
    o.network_failure = true;
    o.error = e.what();
  } catch (const Error& e) {
    o.error = e.what();
  }
  return o;
}

std::string image_extension(const std::string& url) {
  std::string path = url.substr(0, url.find_first_of("?#"));
  const auto slash = path.rfind('/');
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return ".jpg";
  std::string ext = lower(path.substr(dot));
  if (ext.size() > 5 || ext.size() < 2) return ".jpg";
  return ext;
}

}  // namespace

CorpusManifest collect(Transport& transport, std::span<const long> ids, const std::filesystem::path& out,
                       const CollectConfig& config) {
  if (config.n_target < 1) throw UsageError("n_target must be >= 1");
  if (config.workers < 1) throw UsageError("workers must be >= 1");

  CorpusManifest manifest;
  std::vector<Outcome> accepted;
  int network_failures = 0, responses = 0;
  std::string last_error;
  for (std::size_t start = 0; start < ids.size() && static_cast<int>(accepted.size()) < config.n_target;
       start += config.workers) {
    const std::size_t end = std::min(ids.size(), start + static_cast<std::size_t>(config.workers));
    std::vector<std::future<Outcome>> inflight;
    for (std::size_t i = start; i < end; ++i)
      inflight.push_back(std::async(std::launch::async, process, std::ref(transport), ids[i], std::cref(config)));
    for (auto& f : inflight) {
      Outcome o = f.get();
      if (o.kind == Outcome::kFailed) {
        ++manifest.failed;
        network_failures += o.network_failure;
        responses += !o.network_failure;
        last_error = o.error;
      } else {
        ++responses;
        if (o.kind == Outcome::kRejected)
          ++manifest.rejected;
        else if (static_cast<int>(accepted.size()) < config.n_target)
          accepted.push_back(std::move(o));
      }
    }
  }
  if (accepted.empty()) {
    if (network_failures > 0 && responses == 0) throw NetworkError("every request failed: " + last_error);
    throw EmptyCorpusError("no accepted objects among " + std::to_string(ids.size()) + " ids");
  }

  std::sort(accepted.begin(), accepted.end(),
            [](const Outcome& a, const Outcome& b) { return a.record.object_id < b.record.object_id; });
  std::ostringstream csv;
  csv << "object_id,title,artist,date,department,culture,medium,dimensions,image\r\n";
  for (const Outcome& o : accepted) {
    const auto& r = o.record;
    CorpusEntry entry{r, std::filesystem::path("images") / (std::to_string(r.object_id) + image_extension(r.primary_image_url))};
    raster::write_file(out / entry.image, std::span(reinterpret_cast<const std::uint8_t*>(o.image.data()), o.image.size()));
    csv << r.object_id << ',' << csv_field(r.title) << ',' << csv_field(r.artist.value_or("")) << ','
        << csv_field(r.date.value_or("")) << ',' << csv_field(r.department.value_or("")) << ','
        << csv_field(r.culture.value_or("")) << ',' << csv_field(r.medium.value_or("")) << ','
        << csv_field(r.dimensions.value_or("")) << ',' << csv_field(entry.image.generic_string()) << "\r\n";
    manifest.entries.push_back(std::move(entry));
  }
  manifest.metadata_csv = out / "metadata.csv";
  const std::string text = csv.str();
  raster::write_file(manifest.metadata_csv, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  return manifest;
}

}  // namespace gap::ingest
