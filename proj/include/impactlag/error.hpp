#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <string>
#include <vector>

namespace impactlag {

// Base of every error the library throws. `kind()` is a stable name used in
// CLI diagnostics and tests.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

#define IMPACTLAG_ERROR(Name)                                                  \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string& what) : Error(#Name, what) {}             \
  }

// ingest
class MalformedLine : public Error {
public:
  MalformedLine(std::string file, std::size_t line_no, const std::string& why)
      : Error("MalformedLine", file + ":" + std::to_string(line_no) + ": " + why),
        file_(std::move(file)), line_no_(line_no) {}
  const std::string& file() const noexcept { return file_; }
  std::size_t line_no() const noexcept { return line_no_; }

private:
  std::string file_;
  std::size_t line_no_;
};

class DuplicateKey : public Error {
public:
  explicit DuplicateKey(std::string key)
      : Error("DuplicateKey", "duplicate key: " + key), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

class YearOutOfRange : public Error {
public:
  YearOutOfRange(std::string key, int year)
      : Error("YearOutOfRange", "year " + std::to_string(year) + " out of range for " + key),
        key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

IMPACTLAG_ERROR(ResolverUnavailable);

// parser
IMPACTLAG_ERROR(EmptyInput);
IMPACTLAG_ERROR(NoBibliographicContent);
IMPACTLAG_ERROR(EmptyCorpus);

// matcher
class InsufficientFields : public Error {
public:
  explicit InsufficientFields(std::vector<std::string> missing)
      : Error("InsufficientFields", describe(missing)), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
  static std::string describe(const std::vector<std::string>& missing) {
    std::string s = "insufficient match fields, missing:";
    for (const auto& m : missing) s += " " + m;
    return s;
  }
  std::vector<std::string> missing_;
};

IMPACTLAG_ERROR(MisalignedCorpora);

// citation metrics
IMPACTLAG_ERROR(PubYearAfterHorizon);
IMPACTLAG_ERROR(UndefinedChannel);

// stats
IMPACTLAG_ERROR(InsufficientTail);
IMPACTLAG_ERROR(LengthMismatch);
IMPACTLAG_ERROR(DegenerateVariance);
IMPACTLAG_ERROR(EmptyUniverse);
IMPACTLAG_ERROR(NonPositiveCP);
IMPACTLAG_ERROR(InvalidArgument);

// reports
IMPACTLAG_ERROR(UnknownField);
IMPACTLAG_ERROR(EmptyCohort);
IMPACTLAG_ERROR(InvalidCohort);

// cli
IMPACTLAG_ERROR(MissingArtifact);
IMPACTLAG_ERROR(ConfigInvalid);

#undef IMPACTLAG_ERROR

}  // namespace impactlag
