#pragma once

#include <stdexcept>
#include <string>

namespace aptest {

struct UnknownPoint : std::runtime_error {
    explicit UnknownPoint(const std::string& what) : std::runtime_error(what) {}
};

struct BadParams : std::invalid_argument {
    explicit BadParams(const std::string& what) : std::invalid_argument(what) {}
};

struct BadSimplex : std::invalid_argument {
    explicit BadSimplex(const std::string& what) : std::invalid_argument(what) {}
};

struct DimMismatch : std::invalid_argument {
    explicit DimMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct SampleBudgetExceeded : std::runtime_error {
    explicit SampleBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct TooManyQueries : std::runtime_error {
    explicit TooManyQueries(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientTrials : std::invalid_argument {
    explicit InsufficientTrials(const std::string& what) : std::invalid_argument(what) {}
};

struct SearchBudget : std::runtime_error {
    explicit SearchBudget(const std::string& what) : std::runtime_error(what) {}
};

struct SingularCovariance : std::runtime_error {
    explicit SingularCovariance(const std::string& what) : std::runtime_error(what) {}
};

struct RegionBlowup : std::runtime_error {
    explicit RegionBlowup(const std::string& what) : std::runtime_error(what) {}
};

struct NeighborhoodStarved : std::runtime_error {
    explicit NeighborhoodStarved(const std::string& what) : std::runtime_error(what) {}
};

struct SubTesterFailure : std::runtime_error {
    int bin_id;
    SubTesterFailure(int bin, const std::string& what)
        : std::runtime_error("bin " + std::to_string(bin) + ": " + what), bin_id(bin) {}
};

struct GenerationFailed : std::runtime_error {
    explicit GenerationFailed(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyInput : std::invalid_argument {
    explicit EmptyInput(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace aptest
