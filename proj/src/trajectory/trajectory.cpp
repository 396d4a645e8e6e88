#include "bms/trajectory/trajectory.hpp"

#include "bms/common/text.hpp"
#include "bms/errors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace bms::trajectory {

std::string_view to_string(LandingClass c) {
    switch (c) {
        case LandingClass::Good: return "good";
        case LandingClass::In: return "in";
        case LandingClass::Out: return "out";
    }
    return "out";
}

std::string_view to_string(ApexClass c) { return c == ApexClass::Good ? "good" : "bad"; }

namespace {

bool between(double v, double a, double b) { return v >= std::min(a, b) && v <= std::max(a, b); }

}  // namespace

LandingClass classify_landing(const LandingPoint& p, const CourtGeometry& g) {
    const bool valid = between(p.x, g.center_x, g.side_x) &&
                       between(p.z, g.short_service_line_z, g.court_back_z);
    if (!valid) return LandingClass::Out;
    const double sx = g.side_x >= g.center_x ? 1.0 : -1.0;
    const double sz = g.court_back_z >= g.short_service_line_z ? 1.0 : -1.0;
    const bool square = between(p.x, g.center_x, g.center_x + sx * g.target_square_m) &&
                        between(p.z, g.short_service_line_z, g.short_service_line_z + sz * g.target_square_m);
    return square ? LandingClass::Good : LandingClass::In;
}

ApexClass classify_apex(double apex_z, double net_z, double server_z) {
    if (net_z == server_z) throw ParameterError("server and net positions coincide");
    const bool inside = apex_z > std::min(net_z, server_z) && apex_z < std::max(net_z, server_z);
    return inside ? ApexClass::Good : ApexClass::Bad;
}

long quantize_clearance(double h_m, double stripe_m) {
    if (!(stripe_m > 0.0)) throw ParameterError("stripe width must be positive");
    if (!std::isfinite(h_m)) throw ParameterError("clearance must be finite");
    if (h_m < 0.0) throw NotClearedError("shuttle did not clear the net");
    return static_cast<long>(std::floor(h_m / stripe_m + 1e-9));
}

double clearance_error_bound(double h_observed_m, double d_shuttle_to_board_m,
                             double d_camera_to_board_m) {
    if (!(h_observed_m >= 0.0) || !std::isfinite(h_observed_m)) {
        throw ParameterError("observed clearance must be non-negative");
    }
    if (!(d_shuttle_to_board_m >= 0.0) || !(d_shuttle_to_board_m < d_camera_to_board_m) ||
        !std::isfinite(d_camera_to_board_m)) {
        throw ParameterError("board distances need 0 <= shuttle distance < camera distance");
    }
    return h_observed_m * d_shuttle_to_board_m / d_camera_to_board_m;
}

Classification classify(const TrajectoryObservation& o, const CourtGeometry& court,
                        const BoardGeometry& board, double stripe_m) {
    Classification c;
    c.landing = classify_landing(o.landing, court);
    c.apex = classify_apex(o.apex_z, court.net_z, o.server_z);
    if (o.clearance_m >= 0.0) {
        c.stripe = quantize_clearance(o.clearance_m, stripe_m);
        c.error_bound_m = clearance_error_bound(o.clearance_m, board.shuttle_to_board_m,
                                                board.camera_to_board_m);
    }
    return c;
}

std::vector<TrajectoryObservation> read_observations(std::istream& in, double default_server_z) {
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    bool has_server = false;
    std::vector<TrajectoryObservation> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = text::split_csv(line);
        if (!header) {
            const std::vector<std::string> base = {"landing_x", "landing_z", "apex_z", "clearance_m"};
            auto with_server = base;
            with_server.push_back("server_z");
            if (cells == base) {
                has_server = false;
            } else if (cells == with_server) {
                has_server = true;
            } else {
                throw ParseError(lineno, "expected header landing_x,landing_z,apex_z,clearance_m[,server_z]");
            }
            header = true;
            continue;
        }
        const std::size_t want = has_server ? 5 : 4;
        if (cells.size() != want) {
            throw ParseError(lineno, "expected " + std::to_string(want) + " cells, got " +
                                         std::to_string(cells.size()));
        }
        TrajectoryObservation o;
        o.landing.x = text::parse_double(cells[0], lineno);
        o.landing.z = text::parse_double(cells[1], lineno);
        o.apex_z = text::parse_double(cells[2], lineno);
        o.clearance_m = text::parse_double(cells[3], lineno);
        o.server_z = has_server ? text::parse_double(cells[4], lineno) : default_server_z;
        out.push_back(o);
    }
    if (!header) throw ParseError(lineno == 0 ? 1 : lineno, "missing header");
    return out;
}

void write_classified(std::ostream& out, const std::vector<TrajectoryObservation>& obs,
                      const std::vector<Classification>& cls) {
    out << "landing_x,landing_z,apex_z,clearance_m,server_z,landing_class,apex_class,stripe,err_bound\n";
    for (std::size_t i = 0; i < obs.size() && i < cls.size(); ++i) {
        const auto& o = obs[i];
        const auto& c = cls[i];
        out << text::format_double(o.landing.x) << ',' << text::format_double(o.landing.z) << ','
            << text::format_double(o.apex_z) << ',' << text::format_double(o.clearance_m) << ','
            << text::format_double(o.server_z) << ',' << to_string(c.landing) << ','
            << to_string(c.apex) << ',' << (c.stripe ? std::to_string(*c.stripe) : "none") << ','
            << (c.stripe ? text::format_double(c.error_bound_m) : "") << '\n';
    }
}

}  // namespace bms::trajectory
