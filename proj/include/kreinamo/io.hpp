#pragma once

#include "kreinamo/mesh.hpp"
#include "kreinamo/soliton.hpp"
#include "kreinamo/tracker.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace kreinamo {

/// 17 significant digits; round-trips every double.
std::string format_double(double v);

class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header);
    CsvWriter& cell(double v);
    CsvWriter& cell(int v);
    CsvWriter& cell(const std::string& v);
    CsvWriter& empty();
    void end_row();

private:
    std::ostream& os_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

/// Only the Im λ ≥ 0 representative of each conjugate pair is written.
void write_branches_csv(std::ostream& os, const SweepResult& sweep);
void write_branch_points_csv(std::ostream& os, const std::vector<BranchPoint>& points);
void write_resonance_csv(std::ostream& os, const std::vector<ResonanceRow>& rows);

struct SolitonRow {
    int l = 0;
    double x0 = 0.0;
    Complex lambda;
    Complex epsilon;
    bool localized = true;
    double X = 0.0;
    int M = 0;
};
void write_soliton_csv(std::ostream& os, const std::vector<SolitonRow>& rows);
void write_cutoff_csv(std::ostream& os, const CutoffTable& table);
void write_mesh_csv(std::ostream& os, int l, int n_max, double alpha0_max, int samples);
void write_dp_csv(std::ostream& os, const std::vector<DiabolicalPoint>& dps);

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

struct PlotPanel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    bool markers = false;  // dots instead of a polyline
};

/// Standalone SVG with the panels stacked vertically.
void write_svg(std::ostream& os, const std::vector<PlotPanel>& panels);

/// Writes `content` to dir/name, creating dir; returns the path.
std::string write_file(const std::string& dir, const std::string& name, const std::string& content);

}  // namespace kreinamo
