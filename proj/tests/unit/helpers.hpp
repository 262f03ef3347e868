#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <json.hpp>

#include "mchain/config.hpp"
#include "mchain/gaussian_state.hpp"

namespace testing {

// Config from a flat JSON patch on top of a small quantum-jump chain.
mchain::SimConfig small_config(const nlohmann::json& patch = {});

// Random orthonormal L x N orbitals.
mchain::GaussianState random_state(int L, int N, std::mt19937_64& rng);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

std::string slurp(const std::filesystem::path& p);

}  // namespace testing
