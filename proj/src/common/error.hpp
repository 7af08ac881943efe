#pragma once

#include <stdexcept>
#include <string>

namespace slicereview {

/// Error categories shared by every module. The C API reports these as
/// integer status codes, so the numeric values are part of the ABI.
enum class ErrorCode : int {
  kOk = 0,
  kConfig = 1,
  kIo = 2,
  kSnapshot = 3,
  kDiffParse = 4,
  kSourceParse = 5,
  kRenderParse = 6,
  kBackend = 7,
  kCommentParse = 8,
  kDataset = 9,
  kInvalidArgument = 10,
  kInternal = 11,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorCode::kConfig, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorCode::kIo, m) {}
};

class SnapshotError : public Error {
 public:
  explicit SnapshotError(const std::string& m) : Error(ErrorCode::kSnapshot, m) {}
};

/// Carries the 1-based line of the diff text that failed to parse.
class DiffParseError : public Error {
 public:
  DiffParseError(int line, const std::string& m)
      : Error(ErrorCode::kDiffParse, "diff line " + std::to_string(line) + ": " + m),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class SourceParseError : public Error {
 public:
  SourceParseError(int line, const std::string& m)
      : Error(ErrorCode::kSourceParse, "line " + std::to_string(line) + ": " + m),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Carries the 0-based row index of the offending rendered row.
class RenderParseError : public Error {
 public:
  RenderParseError(int row, const std::string& m)
      : Error(ErrorCode::kRenderParse, "row " + std::to_string(row) + ": " + m), row_(row) {}
  int row() const noexcept { return row_; }

 private:
  int row_;
};

/// status is the HTTP status when one was received, otherwise 0.
class BackendError : public Error {
 public:
  BackendError(int status, const std::string& m)
      : Error(ErrorCode::kBackend, m), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class CommentParseError : public Error {
 public:
  explicit CommentParseError(const std::string& m) : Error(ErrorCode::kCommentParse, m) {}
};

class DatasetError : public Error {
 public:
  explicit DatasetError(const std::string& m) : Error(ErrorCode::kDataset, m) {}
};

}  // namespace slicereview
