#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spellscan {

// Base for every error raised by the library. The CLI prints what() on one
// line prefixed by kind().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::size_t byte_offset)
      : Error(what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }
  const char* kind() const noexcept override { return "ingest"; }

 private:
  std::size_t byte_offset_;
};

class LexiconError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "lexicon"; }
};

class VocabError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "vocab"; }
};

class TokenizeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "tokenize"; }
};

class BuildError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "build"; }
};

// Malformed line-delimited record; line is 1-based.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const char* kind() const noexcept override { return "format"; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

class InputError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "input"; }
};

class TrainingError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "training"; }
};

class CheckpointError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "checkpoint"; }
};

class AlignmentError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "alignment"; }
};

class AttributionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "attribution"; }
};

class UsageError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "usage"; }
};

}  // namespace spellscan
