#pragma once
#include <stdexcept>
#include <string>

namespace decum {

// Problems reading or checking bundled data files (missing file, bad header,
// malformed row, digest mismatch).  CLI maps this class to exit code 2.
class IngestError : public std::runtime_error {
public:
    explicit IngestError(const std::string& what) : std::runtime_error(what) {}
};

// Domain violations: parameters outside a formula's validity range, window
// mismatches, degenerate inputs.  CLI maps this class to exit code 3.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace decum
