#pragma once

#include <json.hpp>

#include "fairshare/approx.hpp"
#include "fairshare/certify.hpp"
#include "fairshare/cover.hpp"
#include "fairshare/instance.hpp"

namespace fairshare {

/// Rationals are written as exact strings ("3/7", "2").
nlohmann::json to_json(const ShareVector& shares);
/// Throws std::invalid_argument on a malformed document.
ShareVector share_vector_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Allocation& alloc);
/// "theta" is "unconstrained" when every share is zero.
nlohmann::json to_json(const ApproxResult& r);
nlohmann::json to_json(const CoverReport& r);
nlohmann::json to_json(const DualReport& r);
nlohmann::json to_json(const PlaneReport& r);

}  // namespace fairshare
