#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace bms::trajectory {

/// Receiving service court in the court plane. z runs along the serve direction from the net,
/// x across the court. Defaults describe the doubles right service court.
struct CourtGeometry {
    double net_z = 0.0;
    double short_service_line_z = 1.98;
    double court_back_z = 5.94;  // doubles long service line
    double center_x = 0.0;
    double side_x = 3.05;  // doubles side line
    double target_square_m = 0.40;
};

struct LandingPoint {
    double x = 0.0;
    double z = 0.0;
};

struct TrajectoryObservation {
    LandingPoint landing;
    double apex_z = 0.0;
    double clearance_m = 0.0;  // negative: the shuttle did not pass
    double server_z = 0.0;
};

enum class LandingClass { Good, In, Out };
enum class ApexClass { Good, Bad };

std::string_view to_string(LandingClass c);
std::string_view to_string(ApexClass c);

/// Closed target square at the center-line / short-service-line corner, inside the closed valid
/// region between those lines, the side line and the back line.
LandingClass classify_landing(const LandingPoint& p, const CourtGeometry& g);

/// Good iff apex_z lies strictly between server_z and net_z. Throws ParameterError if they
/// coincide.
ApexClass classify_apex(double apex_z, double net_z, double server_z);

inline constexpr double kStripeWidthM = 0.02;

/// Stripe index floor(h / stripe). A relative tolerance of 1e-9 stripes keeps exact multiples
/// such as 0.06 on their own stripe. Throws NotClearedError for h < 0.
long quantize_clearance(double h_m, double stripe_m = kStripeWidthM);

/// Worst-case parallax error h * d / D for a shuttle d from the board seen by a camera D from it.
/// Throws ParameterError unless h >= 0 and 0 <= d < D.
double clearance_error_bound(double h_observed_m, double d_shuttle_to_board_m,
                             double d_camera_to_board_m);

struct BoardGeometry {
    double shuttle_to_board_m = 0.5;
    double camera_to_board_m = 1.5;
};

struct Classification {
    LandingClass landing = LandingClass::Out;
    ApexClass apex = ApexClass::Bad;
    std::optional<long> stripe;  // empty when the shuttle did not clear
    double error_bound_m = 0.0;
};

Classification classify(const TrajectoryObservation& o, const CourtGeometry& court,
                        const BoardGeometry& board, double stripe_m = kStripeWidthM);

/// Header `landing_x,landing_z,apex_z,clearance_m` with an optional trailing `server_z` column;
/// rows without it use `default_server_z`. Throws ParseError with the offending line.
std::vector<TrajectoryObservation> read_observations(std::istream& in, double default_server_z);

/// Input columns plus `landing_class,apex_class,stripe,err_bound`.
void write_classified(std::ostream& out, const std::vector<TrajectoryObservation>& obs,
                      const std::vector<Classification>& cls);

}  // namespace bms::trajectory
