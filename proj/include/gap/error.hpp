#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gap {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { kUsage = 1, kData = 2, kNetwork = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::kUsage, what) {}
};

// Invalid configuration (grid larger than canvas, bad ratios, ...).
class ConfigError : public UsageError {
 public:
  explicit ConfigError(const std::string& what) : UsageError(what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

class DecodeError : public DataError {
 public:
  DecodeError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class ShapeError : public DataError {
 public:
  explicit ShapeError(const std::string& what) : DataError(what) {}
};

class EmptyMaskError : public DataError {
 public:
  explicit EmptyMaskError(const std::string& what) : DataError(what) {}
};

class SchemaError : public DataError {
 public:
  explicit SchemaError(const std::string& what) : DataError(what) {}
};

class SchemaVersionError : public SchemaError {
 public:
  SchemaVersionError(int found, int expected);
  int found() const { return found_; }

 private:
  int found_;
};

class EmptyCorpusError : public DataError {
 public:
  explicit EmptyCorpusError(const std::string& what) : DataError(what) {}
};

class DivergenceError : public DataError {
 public:
  explicit DivergenceError(int epoch);
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

class NetworkError : public Error {
 public:
  explicit NetworkError(const std::string& what) : Error(ErrorKind::kNetwork, what) {}
};

// HTTP status != 200, or status 0 for connection-level failures.
class TransportError : public NetworkError {
 public:
  TransportError(const std::string& url, int status);
  int status() const { return status_; }

 private:
  int status_;
};

}  // namespace gap
