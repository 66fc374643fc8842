#pragma once

// Bundled cross-checks behind `sisdecay validate`.

#include <json.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sisdecay {

enum class ValidationLevel { Quick, Full };

enum class Fault {
    None,
    F2SignFlip,  // negates f_2 before the Newton bound is formed
};

struct CheckOutcome {
    std::string suite;
    std::string property;
    bool passed = true;
    std::string detail;
};

struct ValidationReport {
    ValidationLevel level = ValidationLevel::Quick;
    std::vector<CheckOutcome> checks;
    double seconds = 0;

    [[nodiscard]] bool ok() const;
    /// The first failing check, if any.
    [[nodiscard]] std::optional<CheckOutcome> first_failure() const;
    /// suite -> {passed, failed}
    [[nodiscard]] std::map<std::string, std::pair<std::size_t, std::size_t>> suite_counts() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

ValidationReport run_validation(ValidationLevel level, Fault fault = Fault::None);

}  // namespace sisdecay
