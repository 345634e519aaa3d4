#include "polyart/reports.hpp"

#include <cmath>
#include <cstdio>

namespace polyart {

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::string frac(double v) { return fixed(v, 6); }
std::string pct(double v) { return fixed(v, 4); }

std::string phi_cell(double v) {
    return std::isnan(v) ? std::string("n/a") : pct(v);
}

constexpr const char* kRelationHeader =
    "polyp_type,frequency,any_artifact_pct,bubbles_pct,blur_pct,misc_pct,"
    "specularity_pct,saturation_pct,contrast_pct";

constexpr const char* kCorrHeader =
    "class,bubbles,blur,misc,specularity,saturation,contrast";

}  // namespace

std::string to_csv(const Metrics& m) {
    std::string out = "tp,fp,fn,precision,recall,f1,f2\n";
    out += std::to_string(m.tp) + "," + std::to_string(m.fp) + "," +
           std::to_string(m.fn) + "," + frac(m.precision) + "," +
           frac(m.recall) + "," + frac(m.f1) + "," + frac(m.f2) + "\n";
    return out;
}

std::string to_markdown(const Metrics& m) {
    std::string out;
    out += "| tp | fp | fn | precision | recall | f1 | f2 |\n";
    out += "|---|---|---|---|---|---|---|\n";
    out += "| " + std::to_string(m.tp) + " | " + std::to_string(m.fp) +
           " | " + std::to_string(m.fn) + " | " + frac(m.precision) + " | " +
           frac(m.recall) + " | " + frac(m.f1) + " | " + frac(m.f2) + " |\n";
    return out;
}

std::string to_csv(const PresenceReport& r) {
    std::string out =
        "artifact,frequency_pct,d_precision_pct,d_recall_pct,d_f1_pct,"
        "d_f2_pct,degenerate\n";
    for (const PresenceClassRow& row : r.rows) {
        out += std::string(to_string(row.cls)) + "," +
               pct(row.frequency * 100.0) + "," + pct(row.d_precision) + "," +
               pct(row.d_recall) + "," + pct(row.d_f1) + "," + pct(row.d_f2) +
               "," + (row.degenerate ? "yes" : "no") + "\n";
    }
    return out;
}

std::string to_markdown(const PresenceReport& r) {
    std::string out;
    out += "| artifact | frequency (%) | precision | recall | F1 | F2 |\n";
    out += "|---|---|---|---|---|---|\n";
    for (const PresenceClassRow& row : r.rows) {
        out += "| " + std::string(to_string(row.cls)) + " | " +
               pct(row.frequency * 100.0) + " | " + pct(row.d_precision) +
               " | " + pct(row.d_recall) + " | " + pct(row.d_f1) + " | " +
               pct(row.d_f2) + " |\n";
    }
    return out;
}

std::string to_csv(const RelationReport& r) {
    std::string out = std::string(kRelationHeader) + "\n";
    for (const RelationRow& row : r.rows) {
        out += std::string(to_string(row.category)) + "," +
               std::to_string(row.frequency) + "," +
               pct(row.any_share * 100.0);
        for (double share : row.class_share) {
            out += "," + pct(share * 100.0);
        }
        out += "\n";
    }
    return out;
}

std::string to_markdown(const RelationReport& r) {
    std::string out;
    out += "| polyp type | frequency | any artifact | bubbles | blur | misc "
           "| specularity | saturation | contrast |\n";
    out += "|---|---|---|---|---|---|---|---|---|\n";
    for (const RelationRow& row : r.rows) {
        out += "| " + std::string(to_string(row.category)) + " | " +
               std::to_string(row.frequency) + " | " +
               pct(row.any_share * 100.0);
        for (double share : row.class_share) {
            out += " | " + pct(share * 100.0);
        }
        out += " |\n";
    }
    return out;
}

std::string to_csv(const CorrelationMatrix& m) {
    std::string out = std::string(kCorrHeader) + "\n";
    for (std::size_t a = 0; a < kAnalysisClassCount; ++a) {
        out += std::string(to_string(kReportClassOrder[a]));
        for (std::size_t b = 0; b < kAnalysisClassCount; ++b) {
            out += "," + phi_cell(m.phi[a][b]);
        }
        out += "\n";
    }
    return out;
}

std::string to_markdown(const CorrelationMatrix& m) {
    std::string out;
    out += "| | bubbles | blur | misc | specularity | saturation | contrast "
           "|\n";
    out += "|---|---|---|---|---|---|---|\n";
    for (std::size_t a = 0; a < kAnalysisClassCount; ++a) {
        out += "| " + std::string(to_string(kReportClassOrder[a]));
        for (std::size_t b = 0; b < kAnalysisClassCount; ++b) {
            out += " | " + phi_cell(m.phi[a][b]);
        }
        out += " |\n";
    }
    return out;
}

}  // namespace polyart
