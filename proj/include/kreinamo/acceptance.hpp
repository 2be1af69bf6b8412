#pragma once

#include <functional>
#include <string>
#include <vector>

namespace kreinamo {

struct CriterionResult {
    std::string id;
    std::string title;
    bool passed = false;
    std::string detail{};
    double seconds = 0.0;
};

struct AcceptanceOptions {
    int workers = 1;
    std::vector<std::string> only;  // empty runs everything
};

/// "1" … "10" and "reversal", in report order.
std::vector<std::string> acceptance_ids();

CriterionResult run_criterion(const std::string& id, const AcceptanceOptions& opt);

/// Runs the selected criteria, handing each result to `report` as it completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& report);

/// "[PASS] 3  title: detail (12.3 s)"
std::string format_result(const CriterionResult& r);

}  // namespace kreinamo
