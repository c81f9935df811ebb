#include "modeswim/drive.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <map>
#include <numbers>
#include <ostream>
#include <thread>
#include <tuple>

#include "modeswim/analytic.hpp"
#include "modeswim/error.hpp"
#include "modeswim/grid.hpp"

namespace modeswim::drive {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Shape function tables at the 3x3 Gauss points, keyed by element size.
struct GaussTable {
    std::vector<fem::ShapeEval> evals;
    std::vector<double> weights;  // includes the Jacobian
    std::vector<std::array<double, 2>> offsets;  // from the element's lower-left corner
};

const GaussTable& gauss_table(std::map<std::pair<double, double>, GaussTable>& cache, double w, double h) {
    auto it = cache.find({w, h});
    if (it != cache.end()) return it->second;
    GaussTable t;
    const auto pts = fem::gauss_points(3);
    const auto wts = fem::gauss_weights(3);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
            t.evals.push_back(fem::evaluate_shape(w, h, pts[i], pts[j]));
            t.weights.push_back(wts[i] * wts[j] * 0.25 * w * h);
            t.offsets.push_back({0.5 * w * (1.0 + pts[i]), 0.5 * h * (1.0 + pts[j])});
        }
    }
    return cache.emplace(std::pair{w, h}, std::move(t)).first->second;
}

std::array<double, 2> area_centroid(const fem::Mesh& mesh) {
    double a = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& p = mesh.nodes[mesh.elements[e].nodes[0]];
        const double w = mesh.element_width(e), h = mesh.element_height(e);
        a += w * h;
        sx += w * h * (p.x + 0.5 * w);
        sy += w * h * (p.y + 0.5 * h);
    }
    return {sx / a, sy / a};
}

std::string grid_tag(double f, double phase) {
    return " (at frequency " + format_number(f) + " Hz, phase " + format_number(phase) + " deg)";
}

[[noreturn]] void rethrow_tagged(const std::exception_ptr& ep, const std::string& tag) {
    try {
        std::rethrow_exception(ep);
    } catch (const SingularityError& e) {
        throw SingularityError(e.what() + tag);
    } catch (const ConfigError& e) {
        throw ConfigError(e.what() + tag);
    } catch (const SolverError& e) {
        throw SolverError(e.what() + tag);
    } catch (const Error& e) {
        throw Error(e.what() + tag);
    }
}

}  // namespace

void DriveCondition::validate() const {
    if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz)) throw DomainError("drive frequency must be positive");
    if (!(damping_ratio >= 0.0) || !(damping_ratio < 1.0)) throw DomainError("damping ratio must lie in [0, 1)");
    if (!std::isfinite(phase_difference_deg)) throw DomainError("phase difference must be finite");
}

double wrap_phase_deg(double degrees) {
    double r = std::fmod(degrees, 360.0);
    if (r <= -180.0) r += 360.0;
    if (r > 180.0) r -= 360.0;
    return r;
}

double MotionEstimate::thrust_magnitude() const { return std::hypot(thrust[0], thrust[1]); }

std::string MotionEstimate::label() const {
    switch (kind) {
        case MotionKind::still: return "static";
        case MotionKind::forward: return "forward";
        case MotionKind::backward: return "backward";
        case MotionKind::rotate_cw: return "rotate_cw";
        case MotionKind::rotate_ccw: return "rotate_ccw";
        case MotionKind::translate:
            return std::string("translate(") + (bearing_deg > 0 ? "+" : "") + std::to_string(bearing_deg) + ")";
        case MotionKind::turning: return turning_left ? "turning(left)" : "turning(right)";
    }
    return "static";
}

MotionEstimate mirrored(const MotionEstimate& e) {
    MotionEstimate m = e;
    m.thrust[1] = -e.thrust[1];
    m.yaw_moment = -e.yaw_moment;
    if (e.kind == MotionKind::rotate_cw) m.kind = MotionKind::rotate_ccw;
    if (e.kind == MotionKind::rotate_ccw) m.kind = MotionKind::rotate_cw;
    if (e.bearing_deg != 180) m.bearing_deg = -e.bearing_deg;
    m.turning_left = e.kind == MotionKind::turning ? !e.turning_left : e.turning_left;
    return m;
}

ComplexVector patch_load_vector(const fem::Mesh& mesh, const ActuatorPatch& patch) {
    const auto& fp = patch.footprint;
    if (!(fp.x1 > fp.x0) || !(fp.y1 > fp.y0)) throw ConfigError("actuator footprint must have positive extent");
    if (!(patch.amplitude >= 0.0) || !std::isfinite(patch.amplitude)) {
        throw ConfigError("actuator amplitude must be >= 0");
    }
    const auto pts = fem::gauss_points(4);
    const auto wts = fem::gauss_weights(4);
    Eigen::VectorXd real = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.dof_count()));
    double covered = 0.0;
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& p0 = mesh.nodes[mesh.elements[e].nodes[0]];
        const double w = mesh.element_width(e), h = mesh.element_height(e);
        const double ix0 = std::max(fp.x0, p0.x), ix1 = std::min(fp.x1, p0.x + w);
        const double iy0 = std::max(fp.y0, p0.y), iy1 = std::min(fp.y1, p0.y + h);
        if (!(ix1 > ix0) || !(iy1 > iy0)) continue;
        covered += (ix1 - ix0) * (iy1 - iy0);
        fem::ShapeRow fe = fem::ShapeRow::Zero();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = 0; j < pts.size(); ++j) {
                const double x = 0.5 * (ix0 + ix1) + 0.5 * (ix1 - ix0) * pts[i];
                const double y = 0.5 * (iy0 + iy1) + 0.5 * (iy1 - iy0) * pts[j];
                const double s = 2.0 * (x - p0.x) / w - 1.0;
                const double t = 2.0 * (y - p0.y) / h - 1.0;
                const double weight = wts[i] * wts[j] * 0.25 * (ix1 - ix0) * (iy1 - iy0);
                fe += weight * fem::evaluate_shape(w, h, s, t).n;
            }
        }
        const auto dofs = fem::element_dofs(mesh, e);
        for (std::size_t k = 0; k < 12; ++k) real[static_cast<Eigen::Index>(dofs[k])] += fe[static_cast<Eigen::Index>(k)];
    }
    if (std::abs(covered - fp.area()) > 1e-9 * fp.area()) {
        throw ConfigError("actuator footprint [" + format_number(fp.x0) + ", " + format_number(fp.x1) + "] x [" +
                          format_number(fp.y0) + ", " + format_number(fp.y1) + "] extends outside the plate");
    }
    const auto p = analytic::unit_phasor(patch.phase_rad);
    return real.cast<cd>() * (patch.amplitude * cd(p.c, p.s));
}

ComplexVector drive_loads(const fem::Mesh& mesh, std::span<const ActuatorPatch> patches, const DriveCondition& drive) {
    ComplexVector f = ComplexVector::Zero(static_cast<Eigen::Index>(mesh.dof_count()));
    for (std::size_t p = 0; p < patches.size(); ++p) {
        ActuatorPatch patch = patches[p];
        if (p == 1) patch.phase_rad -= drive.phase_difference_deg * kPi / 180.0;
        f += patch_load_vector(mesh, patch);
    }
    return f;
}

OperatingShape harmonic_response(const eigen::ModalBasis& basis, const ComplexVector& loads, const DriveCondition& drive) {
    drive.validate();
    if (basis.size() == 0) throw ShapeError("harmonic response needs a non-empty modal basis");
    if (loads.size() != basis.shapes.front().size()) {
        throw ShapeError("load vector has " + std::to_string(loads.size()) + " entries, basis shapes have " +
                         std::to_string(basis.shapes.front().size()));
    }
    const double omega = 2.0 * kPi * drive.frequency_hz;
    OperatingShape out;
    out.frequency_hz = drive.frequency_hz;
    out.dofs = ComplexVector::Zero(loads.size());
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const double wk2 = basis.is_rigid(k) ? 0.0 : std::max(basis.eigenvalues[k], 0.0);
        const double wk = std::sqrt(wk2);
        const cd denom = basis.mass_scale * cd(wk2 - omega * omega, 2.0 * drive.damping_ratio * omega * wk);
        if (denom == cd(0.0, 0.0)) {
            throw SingularityError("undamped drive at " + format_number(drive.frequency_hz) +
                                   " Hz coincides with mode " + std::to_string(k + 1));
        }
        const cd fk = basis.shapes[k].cast<cd>().dot(loads);  // phi is real, so dot == phi^T F
        out.dofs += basis.shapes[k].cast<cd>() * (fk / denom);
    }
    return out;
}

MixingFit fit_mixing_angle(const OperatingShape& shape, const eigen::ModalBasis& basis,
                           const fem::SystemMatrices& matrices, std::pair<std::size_t, std::size_t> pair) {
    if (pair.first >= basis.size() || pair.second >= basis.size()) throw ShapeError("mode pair outside the basis");
    auto restrict = [&](const auto& full) {
        using Vec = std::decay_t<decltype(full)>;
        Vec r(static_cast<Eigen::Index>(matrices.dofs.size()));
        for (std::size_t k = 0; k < matrices.dofs.size(); ++k) r[static_cast<Eigen::Index>(k)] = full[static_cast<Eigen::Index>(matrices.dofs[k])];
        return r;
    };
    const ComplexVector w = restrict(shape.dofs);
    const ComplexVector mw = matrices.mass.cast<cd>() * w;
    const double norm2 = std::abs(w.dot(mw));
    const cd pa = restrict(basis.shapes[pair.first]).cast<cd>().dot(mw);
    const cd pb = restrict(basis.shapes[pair.second]).cast<cd>().dot(mw);
    const double floor = 1e-12 * std::sqrt(norm2);
    if (!(std::abs(pa) > floor) && !(std::abs(pb) > floor)) {
        throw UndefinedAngleError("shape has no component in the degenerate pair; mixing angle undefined");
    }
    MixingFit fit;
    fit.gamma = std::atan2(std::abs(pb), std::abs(pa));
    fit.energy_fraction = (std::norm(pa) + std::norm(pb)) / norm2;
    return fit;
}

void classify(MotionEstimate& e, double characteristic_length, double epsilon) {
    const double t = e.thrust_magnitude();
    const double m = std::abs(e.yaw_moment) / characteristic_length;
    e.bearing_deg = 0;
    e.turning_left = false;
    if (t <= epsilon && m <= epsilon) {
        e.kind = MotionKind::still;
        return;
    }
    if (m > kMomentDominance * t) {
        e.kind = e.yaw_moment > 0.0 ? MotionKind::rotate_ccw : MotionKind::rotate_cw;
        return;
    }
    const double bearing = std::atan2(e.thrust[1], e.thrust[0]) * 180.0 / kPi;
    if (std::abs(bearing) <= kAxisConeDeg) {
        e.kind = MotionKind::forward;
        return;
    }
    if (180.0 - std::abs(bearing) <= kAxisConeDeg) {
        e.kind = MotionKind::backward;
        return;
    }
    if (m > epsilon) {
        e.kind = MotionKind::turning;
        e.turning_left = e.yaw_moment > 0.0;
        return;
    }
    e.kind = MotionKind::translate;
    e.bearing_deg = static_cast<int>(std::lround(bearing));
}

MotionEstimate estimate_motion(const OperatingShape& shape, const fem::Mesh& mesh, const fluid::FluidModel& fluid,
                               double frequency_hz, double epsilon) {
    fluid.validate();
    if (shape.dofs.size() != static_cast<Eigen::Index>(mesh.dof_count())) {
        throw ShapeError("operating shape does not match the mesh DOF count");
    }
    const double omega = 2.0 * kPi * frequency_hz;
    const double scale = fluid.density * omega * omega;
    const auto centroid = area_centroid(mesh);
    std::map<std::pair<double, double>, GaussTable> cache;

    double tx = 0.0, ty = 0.0, mz = 0.0;
    Eigen::Matrix<cd, 12, 1> local;
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& p0 = mesh.nodes[mesh.elements[e].nodes[0]];
        const auto& table = gauss_table(cache, mesh.element_width(e), mesh.element_height(e));
        const auto dofs = fem::element_dofs(mesh, e);
        for (std::size_t k = 0; k < 12; ++k) local[static_cast<Eigen::Index>(k)] = shape.dofs[static_cast<Eigen::Index>(dofs[k])];
        for (std::size_t g = 0; g < table.evals.size(); ++g) {
            const auto& ev = table.evals[g];
            const cd w = ev.n.cast<cd>() * local;
            const cd wx = ev.dx.cast<cd>() * local;
            const cd wy = ev.dy.cast<cd>() * local;
            // A^2 grad(psi) = Im(conj(W) grad W)
            const double gx = (std::conj(w) * wx).imag();
            const double gy = (std::conj(w) * wy).imag();
            const double a2 = std::norm(w);
            const double gnorm = std::hypot(gx, gy);
            if (a2 == 0.0 || !(gnorm > kPhaseGradientFloor * a2)) continue;
            const double mag = scale * a2 * table.weights[g];
            const double fx = -mag * gx / gnorm, fy = -mag * gy / gnorm;
            tx += fx;
            ty += fy;
            const double rx = p0.x + table.offsets[g][0] - centroid[0];
            const double ry = p0.y + table.offsets[g][1] - centroid[1];
            mz += rx * fy - ry * fx;
        }
    }

    const double h = mesh.geometry.heading_deg * kPi / 180.0;
    const double c = std::cos(h), s = std::sin(h);
    MotionEstimate est;
    est.thrust = {c * tx + s * ty, -s * tx + c * ty};
    est.yaw_moment = mz;
    classify(est, mesh.geometry.characteristic_length(), epsilon);
    return est;
}

double MovementMap::max_thrust() const {
    double m = 0.0;
    for (const auto& e : estimates) m = std::max(m, e.thrust_magnitude());
    return m;
}

MovementMap movement_map(const DriveModel& model, std::span<const double> frequencies_hz,
                         std::span<const double> phases_deg, unsigned threads) {
    if (frequencies_hz.empty() || phases_deg.empty()) throw ConfigError("movement map needs non-empty drive axes");
    if (model.patches.empty()) throw ConfigError("movement map needs at least one actuator patch");

    MovementMap map;
    map.frequencies_hz.assign(frequencies_hz.begin(), frequencies_hz.end());
    map.phases_deg.assign(phases_deg.begin(), phases_deg.end());
    const std::size_t nf = map.frequencies_hz.size(), np = map.phases_deg.size();
    map.estimates.resize(nf * np);

    // Per-patch loads at zero phase difference; the drive phase enters as a factor on patch 2.
    std::vector<ComplexVector> patch_loads;
    for (const auto& p : model.patches) patch_loads.push_back(patch_load_vector(model.mesh, p));

    std::vector<std::exception_ptr> errors(nf);
    std::vector<std::size_t> error_phase(nf, 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t fi = next++; fi < nf; fi = next++) {
            std::size_t pi = 0;
            try {
                DriveCondition drive{map.frequencies_hz[fi], 0.0, model.damping_ratio};
                std::vector<ComplexVector> responses;
                for (const auto& load : patch_loads) responses.push_back(harmonic_response(model.basis, load, drive).dofs);
                for (pi = 0; pi < np; ++pi) {
                    OperatingShape shape;
                    shape.frequency_hz = drive.frequency_hz;
                    shape.dofs = responses[0];
                    if (responses.size() > 1) {
                        const auto p = analytic::unit_phasor_deg(-map.phases_deg[pi]);
                        const cd lag(p.c, p.s);
                        shape.dofs += lag * responses[1];
                    }
                    for (std::size_t r = 2; r < responses.size(); ++r) shape.dofs += responses[r];
                    map.estimates[fi * np + pi] = estimate_motion(shape, model.mesh, model.fluid, drive.frequency_hz);
                }
            } catch (...) {
                errors[fi] = std::current_exception();
                error_phase[fi] = pi;
            }
        }
    };

    const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(nf)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    for (std::size_t fi = 0; fi < nf; ++fi) {
        if (errors[fi]) {
            const double phase = error_phase[fi] < np ? map.phases_deg[error_phase[fi]] : 0.0;
            rethrow_tagged(errors[fi], grid_tag(map.frequencies_hz[fi], phase));
        }
    }

    map.epsilon = kMotionThresholdFraction * map.max_thrust();
    const double lchar = model.mesh.geometry.characteristic_length();
    for (auto& e : map.estimates) classify(e, lchar, map.epsilon);
    return map;
}

void write_movement_csv(std::ostream& os, const MovementMap& map) {
    os << "frequency_hz,phase_deg,thrust_x,thrust_y,moment,label\n";
    for (std::size_t fi = 0; fi < map.frequencies_hz.size(); ++fi) {
        for (std::size_t pi = 0; pi < map.phases_deg.size(); ++pi) {
            const auto& e = map.at(fi, pi);
            os << format_number(map.frequencies_hz[fi]) << ',' << format_number(map.phases_deg[pi]) << ','
               << format_number(e.thrust[0]) << ',' << format_number(e.thrust[1]) << ',' << format_number(e.yaw_moment)
               << ',' << e.label() << '\n';
        }
    }
}

ReversalReport verify_reversal(const MovementMap& map, double characteristic_length, double relative_tolerance) {
    ReversalReport report;
    double scale = 0.0;
    for (const auto& e : map.estimates) {
        scale = std::max({scale, e.thrust_magnitude(), std::abs(e.yaw_moment) / characteristic_length});
    }
    if (scale == 0.0) scale = 1.0;

    auto fail = [&](std::string msg) {
        report.pass = false;
        report.failures.push_back(std::move(msg));
    };
    for (std::size_t fi = 0; fi < map.frequencies_hz.size(); ++fi) {
        for (std::size_t pi = 0; pi < map.phases_deg.size(); ++pi) {
            const double phase = wrap_phase_deg(map.phases_deg[pi]);
            const auto& here = map.at(fi, pi);
            const std::string where = grid_tag(map.frequencies_hz[fi], map.phases_deg[pi]);
            if (phase == 0.0) {
                if (std::abs(here.thrust[1]) > map.epsilon || std::abs(here.yaw_moment) / characteristic_length > map.epsilon) {
                    fail("synchronous drive produces lateral thrust or moment" + where);
                }
            }
            for (std::size_t pj = 0; pj < map.phases_deg.size(); ++pj) {
                if (wrap_phase_deg(-map.phases_deg[pj]) != phase) continue;
                const auto expected = mirrored(map.at(fi, pj));
                const double err = std::max({std::abs(here.thrust[0] - expected.thrust[0]),
                                             std::abs(here.thrust[1] - expected.thrust[1]),
                                             std::abs(here.yaw_moment - expected.yaw_moment) / characteristic_length}) /
                                   scale;
                report.worst_relative = std::max(report.worst_relative, err);
                ++report.pairs_checked;
                if (err > relative_tolerance) fail("mirror mismatch " + format_number(err) + where);
                if (here.label() != expected.label()) {
                    fail("label " + here.label() + " does not mirror " + map.at(fi, pj).label() + where);
                }
                break;
            }
        }
    }
    return report;
}

}  // namespace modeswim::drive
