#pragma once

#include <string>

#include "polyart/analysis.hpp"
#include "polyart/evaluation.hpp"

namespace polyart {

/// Report writers. Every writer is deterministic: fixed column order,
/// fixed decimal formatting (counts as integers, fractions with 6
/// decimals, percentages with 4), undefined correlations as "n/a".
///
/// Column contracts:
///   metrics:     tp,fp,fn,precision,recall,f1,f2
///   presence:    artifact,frequency_pct,d_precision_pct,d_recall_pct,
///                d_f1_pct,d_f2_pct,degenerate
///   relation:    polyp_type,frequency,any_artifact_pct,bubbles_pct,
///                blur_pct,misc_pct,specularity_pct,saturation_pct,
///                contrast_pct
///   correlation: class,bubbles,blur,misc,specularity,saturation,contrast

std::string to_csv(const Metrics& m);
std::string to_markdown(const Metrics& m);

std::string to_csv(const PresenceReport& r);
std::string to_markdown(const PresenceReport& r);

std::string to_csv(const RelationReport& r);
std::string to_markdown(const RelationReport& r);

std::string to_csv(const CorrelationMatrix& m);
std::string to_markdown(const CorrelationMatrix& m);

}  // namespace polyart
