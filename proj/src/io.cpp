#include "kreinamo/io.hpp"

#include "kreinamo/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace kreinamo {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header)
    : os_(os), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& v) {
    if (filled_ == columns_) throw std::logic_error("CSV row has too many cells");
    os_ << (filled_++ ? "," : "") << v;
    return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }
CsvWriter& CsvWriter::cell(int v) { return cell(std::to_string(v)); }
CsvWriter& CsvWriter::empty() { return cell(std::string()); }

void CsvWriter::end_row() {
    if (filled_ != columns_) throw std::logic_error("CSV row is incomplete");
    os_ << '\n';
    filled_ = 0;
}

void write_branches_csv(std::ostream& os, const SweepResult& sweep) {
    CsvWriter csv(os, {"branch_id", "param", "re_lambda", "im_lambda", "is_real", "grid_M"});
    for (const Branch& b : sweep.branches)
        for (const BranchSample& p : b.points) {
            if (p.lambda.imag() < 0.0) continue;
            csv.cell(b.id).cell(p.param).cell(p.lambda.real()).cell(p.lambda.imag())
                .cell(p.is_real ? 1 : 0).cell(p.M);
            csv.end_row();
        }
}

void write_branch_points_csv(std::ostream& os, const std::vector<BranchPoint>& points) {
    CsvWriter csv(os, {"order", "param_1", "param_2", "re_lambda", "im_lambda", "residual"});
    for (const BranchPoint& p : points) {
        csv.cell(p.order).cell(p.param_1);
        if (p.param_2)
            csv.cell(*p.param_2);
        else
            csv.empty();
        csv.cell(p.lambda.real()).cell(p.lambda.imag()).cell(p.residual);
        csv.end_row();
    }
}

void write_resonance_csv(std::ostream& os, const std::vector<ResonanceRow>& rows) {
    CsvWriter csv(os, {"dp_n", "dp_m", "eps", "delta", "alpha0_c", "lambda0", "j", "lambda1_re_1",
                       "lambda1_im_1", "lambda1_re_2", "lambda1_im_2", "observed_split_re",
                       "observed_split_im"});
    for (const ResonanceRow& r : rows) {
        csv.cell(r.dp.n).cell(r.dp.m).cell(r.dp.eps).cell(r.dp.delta).cell(r.dp.alpha0_c)
            .cell(r.dp.lambda0);
        if (r.dp.parabola)
            csv.cell(*r.dp.parabola);
        else
            csv.empty();
        for (const Complex& v : r.prediction.lambda1) csv.cell(v.real()).cell(v.imag());
        if (r.observed_plus)
            csv.cell(r.observed_plus->split.real()).cell(r.observed_plus->split.imag());
        else
            csv.empty().empty();
        csv.end_row();
    }
}

void write_soliton_csv(std::ostream& os, const std::vector<SolitonRow>& rows) {
    CsvWriter csv(os, {"l", "x0", "re_lambda", "im_lambda", "epsilon_re", "epsilon_im",
                       "localized_flag", "X", "M"});
    for (const SolitonRow& r : rows) {
        csv.cell(r.l).cell(r.x0).cell(r.lambda.real()).cell(r.lambda.imag())
            .cell(r.epsilon.real()).cell(r.epsilon.imag()).cell(r.localized ? 1 : 0).cell(r.X)
            .cell(r.M);
        csv.end_row();
    }
}

void write_cutoff_csv(std::ostream& os, const CutoffTable& table) {
    CsvWriter csv(os, {"sign", "n", "X", "M", "re_lambda", "im_lambda", "epsilon_re",
                       "localized_flag", "overlap_prev"});
    for (const CutoffMode& m : table.modes)
        for (std::size_t k = 0; k < table.X.size(); ++k) {
            csv.cell(static_cast<int>(m.sign)).cell(m.n).cell(table.X[k]).cell(table.M[k])
                .cell(m.lambda[k].real()).cell(m.lambda[k].imag()).cell(m.epsilon[k].real())
                .cell(m.localized[k] ? 1 : 0);
            if (k > 0)
                csv.cell(m.overlap[k - 1]);
            else
                csv.empty();
            csv.end_row();
        }
}

void write_mesh_csv(std::ostream& os, int l, int n_max, double alpha0_max, int samples) {
    CsvWriter csv(os, {"n", "krein_sign", "alpha0", "lambda"});
    const std::vector<RadialMode> modes = radial_modes(l, n_max);
    for (const RadialMode& mode : modes)
        for (int s : {1, -1})
            for (int k = 0; k < samples; ++k) {
                const double a = alpha0_max * k / (samples - 1);
                csv.cell(mode.n).cell(s).cell(a).cell(mesh_eigenvalue(mode, s, a));
                csv.end_row();
            }
}

void write_dp_csv(std::ostream& os, const std::vector<DiabolicalPoint>& dps) {
    CsvWriter csv(os, {"n", "eps", "m", "delta", "l", "alpha0_c", "lambda0", "same_type", "j"});
    for (const DiabolicalPoint& d : dps) {
        csv.cell(d.n).cell(d.eps).cell(d.m).cell(d.delta).cell(d.l).cell(d.alpha0_c)
            .cell(d.lambda0).cell(d.same_type ? 1 : 0);
        if (d.parabola)
            csv.cell(*d.parabola);
        else
            csv.empty();
        csv.end_row();
    }
}

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::vector<double> ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 5.0, 10.0})
        if (f * mag >= raw) {
            step = f * mag;
            break;
        }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
        t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    return t;
}

std::string short_number(double v) {
    std::ostringstream ss;
    ss.precision(4);
    ss << v;
    return ss.str();
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

void write_svg(std::ostream& os, const std::vector<PlotPanel>& panels) {
    constexpr double W = 720, H = 360, left = 80, right = 20, top = 36, bottom = 50;
    const double total = H * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << total
       << "\" viewBox=\"0 0 " << W << ' ' << total << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const PlotPanel& panel = panels[p];
        const double y0 = H * static_cast<double>(p);
        double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
        for (const auto& s : panel.series)
            for (const auto& [x, y] : s.points) {
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        if (!(xmax >= xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
        if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
        if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
        const double pad = 0.04 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
        const double pw = W - left - right, ph = H - top - bottom;
        auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
        auto sy = [&](double y) { return y0 + top + (ymax - y) / (ymax - ymin) * ph; };

        os << "<text x=\"" << W / 2 << "\" y=\"" << y0 + 22 << "\" text-anchor=\"middle\" font-size=\"14\">"
           << escape_xml(panel.title) << "</text>\n";
        os << "<rect x=\"" << left << "\" y=\"" << y0 + top << "\" width=\"" << pw << "\" height=\"" << ph
           << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (double t : ticks(xmin, xmax)) {
            os << "<line x1=\"" << sx(t) << "\" y1=\"" << y0 + top + ph << "\" x2=\"" << sx(t) << "\" y2=\""
               << y0 + top + ph + 5 << "\" stroke=\"black\"/>"
               << "<text x=\"" << sx(t) << "\" y=\"" << y0 + top + ph + 18 << "\" text-anchor=\"middle\">"
               << short_number(t) << "</text>\n";
        }
        for (double t : ticks(ymin, ymax)) {
            os << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(t) << "\" x2=\"" << left << "\" y2=\"" << sy(t)
               << "\" stroke=\"black\"/>"
               << "<text x=\"" << left - 8 << "\" y=\"" << sy(t) + 4 << "\" text-anchor=\"end\">"
               << short_number(t) << "</text>\n";
        }
        os << "<text x=\"" << left + pw / 2 << "\" y=\"" << y0 + H - 10 << "\" text-anchor=\"middle\">"
           << escape_xml(panel.x_label) << "</text>\n";
        os << "<text transform=\"translate(18," << y0 + top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
           << escape_xml(panel.y_label) << "</text>\n";
        for (std::size_t k = 0; k < panel.series.size(); ++k) {
            const PlotSeries& s = panel.series[k];
            const char* color = kPalette[k % std::size(kPalette)];
            os << "<g><title>" << escape_xml(s.name) << "</title>";
            if (panel.markers) {
                for (const auto& [x, y] : s.points)
                    if (std::isfinite(x) && std::isfinite(y))
                        os << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"1.8\" fill=\"" << color << "\"/>";
            } else {
                os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.3\" points=\"";
                for (const auto& [x, y] : s.points)
                    if (std::isfinite(x) && std::isfinite(y)) os << sx(x) << ',' << sy(y) << ' ';
                os << "\"/>";
            }
            os << "</g>\n";
        }
    }
    os << "</svg>\n";
}

std::string write_file(const std::string& dir, const std::string& name, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << content;
    if (!out) throw InputError("failed writing " + path.string());
    return path.string();
}

}  // namespace kreinamo
