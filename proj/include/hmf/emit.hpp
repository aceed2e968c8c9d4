#ifndef HMF_EMIT_HPP
#define HMF_EMIT_HPP

#include "hmf/pipeline.hpp"

namespace hmf {

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// one json object per sm-pair, deterministic order, exact fraction strings
void emit_jsonl(const SlopeReport& report, const std::string& path);
SlopeReport ingest_jsonl(const std::string& path);

// table-shaped mirror
void emit_tsv(const SlopeReport& report, const std::string& path);

// partial-slope grid figure
void emit_svg_grid(const PartialGrid& grid, const std::string& title, const std::string& path);

void emit_report(const SlopeReport& report, const std::string& format, const std::string& dir);

}  // namespace hmf

#endif
