#include "confsweep/draw.hpp"

#include <algorithm>
#include <sstream>

#include "confsweep/oracle.hpp"

namespace confsweep {

namespace {

double slot_x(int slot) { return 40.0 + slot * 28.0; }
double row_y(int row) { return 30.0 + row * 36.0; }

}  // namespace

std::string render_wiring_svg(const std::vector<Event>& history, int n, int k) {
    if (history.empty()) throw MissingHistory("record carries no sweep history");
    ReplayResult replay = naive_sweep_check(history, n, k);
    if (!replay.ok)
        throw std::invalid_argument("history does not replay: " + replay.message);

    const int m = n - k;
    // Row r holds the order after event r; one extra bottom row shows the
    // reversed base order reached after the closure crossings.
    const int rows = (int)replay.orders.size();
    std::vector<std::vector<int>> slot_of(rows + 1, std::vector<int>(m));
    for (int r = 0; r < rows; ++r)
        for (int p = 0; p < m; ++p) slot_of[r][replay.orders[r][p]] = p;
    for (int w = 0; w < m; ++w) slot_of[rows][w] = m - 1 - w;

    const double width = slot_x(m - 1) + 40.0;
    const double height = row_y(rows) + 30.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<!-- confsweep wiring diagram n=" << n << " k=" << k << " -->\n";

    // working wires
    for (int w = 0; w < m; ++w) {
        svg << "<polyline class=\"wire\" fill=\"none\" stroke=\"#4477aa\" stroke-width=\"1.4\" points=\"";
        for (int r = 0; r <= rows; ++r) {
            svg << slot_x(slot_of[r][w]) << "," << row_y(r);
            if (r < rows) svg << " ";
        }
        svg << "\"/>\n";
    }

    // frame wires and crossing disks
    int frame_rows = 0;
    auto hline = [&](int row) {
        svg << "<line class=\"frame\" stroke=\"#222222\" stroke-width=\"2\" x1=\"" << (slot_x(0) - 24.0)
            << "\" y1=\"" << row_y(row) << "\" x2=\"" << (slot_x(m - 1) + 24.0) << "\" y2=\""
            << row_y(row) << "\"/>\n";
    };
    auto disk = [&](double x, double y) {
        svg << "<circle class=\"kpoint\" fill=\"#111111\" r=\"4.5\" cx=\"" << x << "\" cy=\"" << y
            << "\"/>\n";
    };

    int row = 0;
    for (const Event& e : history) {
        switch (e.kind) {
            case Event::Kind::Init: {
                hline(row);
                ++frame_rows;
                disk(slot_x(0) - 24.0, row_y(row));  // base point at the left end
                // groups sit at their post-init slots
                int id = 0;
                for (int seg = 0; seg < k; ++seg) {
                    id += e.lambda[seg];
                    if (seg < k - 1) {
                        double cx = 0.0;
                        for (int t = 0; t < k - 1; ++t) cx += slot_x(slot_of[row][id + t]);
                        disk(cx / (k - 1), row_y(row));
                        id += k - 1;
                    }
                }
                break;
            }
            case Event::Kind::Frame: {
                hline(row);
                ++frame_rows;
                for (const auto& g : e.groups) {
                    double cx = 0.0;
                    for (int w : g) cx += slot_x(slot_of[row][w]);
                    disk(cx / (double)g.size(), row_y(row));
                }
                break;
            }
            case Event::Kind::Work: {
                double cx = 0.0;
                for (int w : e.chosen) cx += slot_x(slot_of[row][w]);
                disk(cx / (double)e.chosen.size(), row_y(row));
                break;
            }
            case Event::Kind::Close:
                break;
        }
        ++row;
    }
    (void)frame_rows;

    svg << "</svg>\n";
    return svg.str();
}

}  // namespace confsweep
