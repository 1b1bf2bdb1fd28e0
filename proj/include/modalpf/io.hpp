#pragma once

#include <string>

#include "modalpf/spectrum.hpp"

namespace modalpf {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// Shortest round-tripping decimal (17 significant digits).
std::string format_real(double v);

/// JSON for the CLI `eig` subcommand; complex numbers as [re, im].
std::string basis_json(const ModalBasis& basis, const std::string& scheme_label);

}  // namespace modalpf
