#pragma once

#include <nlohmann/json.hpp>

#include "bloomclf/eval.hpp"

namespace bloomclf::detail {

nlohmann::ordered_json report_json(const ClassificationReport& report);
ClassificationReport report_from_json(const nlohmann::ordered_json& j);

}  // namespace bloomclf::detail
