#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "panelfactor/panel.hpp"

namespace panelfactor {

// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);
double parse_double(std::string_view text);

// Panel CSV: first line "n,T", then n lines of T comma-separated values.
void write_panel_csv(std::ostream& out, const PanelMatrix& A);
void write_panel_csv(const std::filesystem::path& path, const PanelMatrix& A);
PanelMatrix read_panel_csv(std::istream& in);
PanelMatrix read_panel_csv(const std::filesystem::path& path);

// Sidecar "kind,index,value" rows; matrix-valued draws use "i:t" as index.
void write_latents_csv(std::ostream& out, const LatentDraws& latents);
void write_latents_csv(const std::filesystem::path& path, const LatentDraws& latents);

}  // namespace panelfactor
