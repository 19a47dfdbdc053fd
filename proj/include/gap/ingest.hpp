#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gap::ingest {

inline constexpr const char* kDefaultBaseUrl = "https://collectionapi.metmuseum.org";
inline constexpr const char* kBaseUrlEnv = "GAP_MET_BASE_URL";

struct MetObjectRecord {
  long object_id = 0;
  std::string title;
  bool is_public_domain = false;
  std::string primary_image_url;
  std::optional<std::string> artist;
  std::optional<std::string> date;
  std::optional<std::string> department;
  std::optional<std::string> culture;
  std::optional<std::string> medium;
  std::optional<std::string> dimensions;
};

// Parses an object-endpoint response. Throws SchemaError when objectID is
// missing or not a positive integer.
MetObjectRecord parse_object(std::string_view json_body);

// Public domain, an image URL, and no "fragment" in the title (any case).
bool accept(const MetObjectRecord& record);

struct HttpResponse {
  int status = 0;  // 0 when no response was received
  std::string body;
};

// Thread-safe GET of an absolute URL.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse get(const std::string& url) = 0;
};

// cpp-httplib client (HTTP and HTTPS), one connection per request.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(std::chrono::seconds timeout = std::chrono::seconds(30)) : timeout_(timeout) {}
  HttpResponse get(const std::string& url) override;

 private:
  std::chrono::seconds timeout_;
};

// $GAP_MET_BASE_URL when set, else the public API host.
std::string base_url_from_env();
std::string object_url(const std::string& base_url, long object_id);

struct RetryPolicy {
  int max_tries = 4;
  std::chrono::milliseconds base_delay{500};
  double factor = 2.0;
};

// GET with exponential backoff on connection failures, 429 and 5xx. Other
// statuses fail at once. Throws TransportError with the last status.
HttpResponse get_with_retry(Transport& transport, const std::string& url, const RetryPolicy& retry);

MetObjectRecord fetch_object(Transport& transport, const std::string& base_url, long object_id,
                             const RetryPolicy& retry = {});

struct CollectConfig {
  int n_target = 1;
  int workers = 20;
  RetryPolicy retry;
  std::string base_url = kDefaultBaseUrl;
};

struct CorpusEntry {
  MetObjectRecord record;
  std::filesystem::path image;  // relative to the corpus root
};

struct CorpusManifest {
  std::vector<CorpusEntry> entries;  // sorted by object_id
  std::filesystem::path metadata_csv;
  int rejected = 0;  // filtered out
  int failed = 0;    // transport or schema failures after retries
};

// Walks ids in order, `workers` requests at a time, and keeps the first
// n_target accepted objects whose image downloads. Writes
// <out>/images/<id>.<ext> and <out>/metadata.csv. Throws UsageError for
// n_target < 1, NetworkError when no request got any response, and
// EmptyCorpusError when nothing is accepted otherwise.
CorpusManifest collect(Transport& transport, std::span<const long> ids, const std::filesystem::path& out,
                       const CollectConfig& config);

// RFC 4180 field quoting.
std::string csv_field(std::string_view value);

}  // namespace gap::ingest
