#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pmrank/evaluate.hpp"
#include "pmrank/inplay.hpp"
#include "pmrank/ridge.hpp"
#include "pmrank/segmentation.hpp"
#include "pmrank/xg.hpp"

namespace pmrank {

using ojson = nlohmann::ordered_json;

// Writes via a temp file in the same directory, then renames into place.
void atomicWriteFile(const std::filesystem::path& path, std::string_view content);

std::string readFile(const std::filesystem::path& path);

// FNV-1a over the canonical key=value rendering of the configuration.
std::string configHash(const std::map<std::string, std::string>& config);

// Shortest round-trip decimal rendering, for CSV payloads.
std::string formatDouble(double value);

ojson xgModelSetToJson(const XgModelSet& set);
XgModelSet xgModelSetFromJson(const ojson& j);

ojson hazardModelSetToJson(const HazardModelSet& set, double gridStep = 0.1);
HazardModelSet hazardModelSetFromJson(const ojson& j);

ojson ratingSolutionToJson(const RatingSolution& solution);
RatingSolution ratingSolutionFromJson(const ojson& j);

ojson cvReportToJson(const CvReport& report);
CvReport cvReportFromJson(const ojson& j);

ojson segmentObservationToJson(const SegmentObservation& obs,
                               const std::vector<std::string>& leagues);

}  // namespace pmrank
