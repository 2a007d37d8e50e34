#pragma once

#include "relusynth/network.hpp"

#include <json.hpp>
#include <stdexcept>
#include <string>

namespace relusynth {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

nlohmann::json serialize(const Network& net);
Network deserialize(const nlohmann::json& doc);

void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace relusynth
