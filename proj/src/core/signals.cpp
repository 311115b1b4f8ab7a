#include "core/signals.hpp"

#include <algorithm>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace polyinv::signals {

using nlohmann::json;

std::string signal_kind_name(SignalKind kind) {
    switch (kind) {
        case SignalKind::sine_plus_noise: return "sine_plus_noise";
        case SignalKind::filtered_random_steps: return "filtered_random_steps";
        case SignalKind::multisine_with_guard: return "multisine_with_guard";
        case SignalKind::meal_train: return "meal_train";
        case SignalKind::step_disturbance: return "step_disturbance";
    }
    fail(ErrorCode::internal, "signal_kind_name: unknown kind");
}

SignalKind signal_kind_from_name(const std::string& name) {
    for (SignalKind kind :
         {SignalKind::sine_plus_noise, SignalKind::filtered_random_steps,
          SignalKind::multisine_with_guard, SignalKind::meal_train, SignalKind::step_disturbance}) {
        if (signal_kind_name(kind) == name) return kind;
    }
    fail(ErrorCode::parse, "unknown signal kind '" + name + "'");
}

double SignalSpec::param(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

json SignalSpec::to_json() const {
    json jp = json::object();
    for (const auto& [key, value] : params) jp[key] = value;
    return json{{"kind", signal_kind_name(kind)}, {"params", std::move(jp)}, {"seed", seed}};
}

SignalSpec SignalSpec::from_json(const json& j) {
    try {
        SignalSpec spec;
        spec.kind = signal_kind_from_name(j.at("kind").get<std::string>());
        if (j.contains("params")) {
            for (const auto& [key, value] : j.at("params").items()) {
                spec.params[key] = value.get<double>();
            }
        }
        spec.seed = j.value("seed", std::uint64_t{0});
        return spec;
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, std::string("SignalSpec JSON: ") + e.what());
    }
}

namespace {

std::size_t sample_count(double duration, double dt) {
    if (!(duration > 0.0) || !(dt > 0.0)) {
        fail(ErrorCode::invalid_argument, "generate_signal: duration and dt must be positive");
    }
    return static_cast<std::size_t>(std::llround(duration / dt));
}

void require_positive(double value, const char* what) {
    if (!(value > 0.0)) {
        fail(ErrorCode::invalid_argument, std::string("generate_signal: ") + what + " must be positive");
    }
}

std::vector<std::vector<double>> sine_plus_noise(const SignalSpec& spec, double duration,
                                                 double dt) {
    const double amplitude = spec.param("amplitude", 0.3);
    const double frequency = spec.param("frequency", 1.0);
    const double noise_std = spec.param("noise_std", 0.0);
    require_positive(frequency, "frequency");
    if (noise_std < 0.0) fail(ErrorCode::invalid_argument, "generate_signal: noise_std must be non-negative");
    RngStream rng(spec.seed, "sine_plus_noise");
    const std::size_t n = sample_count(duration, dt);
    std::vector<std::vector<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        double v = amplitude * std::sin(frequency * t);
        if (noise_std > 0.0) v += noise_std * rng.normal();
        out[i] = {v};
    }
    return out;
}

// Two cascaded identical first-order sections (critically damped realization
// of the second-order low-pass): monotone step response, no overshoot.
struct CascadeFilter {
    double pole;
    double y1 = 0.0, y2 = 0.0;
    explicit CascadeFilter(double cutoff, double dt) : pole(std::exp(-cutoff * dt)) {}
    double apply(double x) {
        y1 = pole * y1 + (1.0 - pole) * x;
        y2 = pole * y2 + (1.0 - pole) * y1;
        return y2;
    }
};

std::vector<std::vector<double>> filtered_random_steps(const SignalSpec& spec, double duration,
                                                       double dt) {
    const double amplitude = spec.param("amplitude", 1.0);
    const double step_hold = spec.param("step_hold", 10.0);
    const double cutoff = spec.param("cutoff", 2.0);
    const double noise_std = spec.param("noise_std", 0.0);
    const int channels = static_cast<int>(spec.param("channels", 1.0));
    const double spread = spec.param("channel_spread", 0.2);
    require_positive(amplitude, "amplitude");
    require_positive(step_hold, "step_hold");
    require_positive(cutoff, "cutoff");
    if (channels < 1) fail(ErrorCode::invalid_argument, "generate_signal: channels must be positive");

    RngStream rng(spec.seed, "filtered_random_steps");
    const std::size_t n = sample_count(duration, dt);
    const std::size_t hold = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(step_hold / dt)));
    std::vector<CascadeFilter> filters(static_cast<std::size_t>(channels), CascadeFilter(cutoff, dt));
    std::vector<double> levels(static_cast<std::size_t>(channels), 0.0);
    std::vector<std::vector<double>> out(n, std::vector<double>(static_cast<std::size_t>(channels)));
    for (std::size_t i = 0; i < n; ++i) {
        if (i % hold == 0) {
            // Later channels track the first with a bounded offset, so
            // multi-channel references stay similar but not equal.
            levels[0] = rng.uniform(-amplitude, amplitude);
            for (int ch = 1; ch < channels; ++ch) {
                const double offset = spread * rng.uniform(-amplitude, amplitude);
                levels[static_cast<std::size_t>(ch)] =
                    std::clamp(levels[0] + offset, -amplitude, amplitude);
            }
        }
        for (int ch = 0; ch < channels; ++ch) {
            double v = filters[static_cast<std::size_t>(ch)].apply(levels[static_cast<std::size_t>(ch)]);
            if (noise_std > 0.0) v += noise_std * rng.normal();
            out[i][static_cast<std::size_t>(ch)] = v;
        }
    }
    return out;
}

std::vector<std::vector<double>> multisine_with_guard(const SignalSpec& spec, double duration,
                                                      double dt) {
    const double u_lo = spec.param("u_lo", 50.0);
    const double u_hi = spec.param("u_hi", 150.0);
    if (u_hi < u_lo) fail(ErrorCode::invalid_argument, "generate_signal: u_hi must be >= u_lo");
    RngStream rng(spec.seed, "multisine_with_guard");
    const double amp = rng.uniform(u_lo, u_hi);
    const double w11 = rng.uniform(spec.param("w11_lo", 0.05), spec.param("w11_hi", 0.09));
    const double w12 = rng.uniform(spec.param("w12_lo", 0.05), spec.param("w12_hi", 0.11));
    const double w21 = rng.uniform(spec.param("w21_lo", 0.04), spec.param("w21_hi", 0.1));
    const double w22 = rng.uniform(spec.param("w22_lo", 0.7), spec.param("w22_hi", 1.2));

    const std::size_t n = sample_count(duration, dt);
    std::vector<std::vector<double>> out(n, std::vector<double>(2, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        // Rest windows, indexed in samples: (500,1000], (1500,2000],
        // (2500,3000], (3500,4000].
        if (i >= 1 && i <= 4000 && (i - 1) % 1000 >= 500) continue;
        const double t = static_cast<double>(i) * dt;
        out[i][0] = amp * (std::sin(w11 * t) + std::sin(w12 * t));
        out[i][1] = amp * (std::sin(w21 * t) + std::sin(w22 * t));
    }
    return out;
}

std::vector<std::vector<double>> step_disturbance(const SignalSpec& spec, double duration,
                                                  double dt) {
    const double amplitude = spec.param("amplitude", 0.5);
    const double cutoff = spec.param("cutoff", 0.0);
    const int channels = static_cast<int>(spec.param("channels", 1.0));
    if (channels < 1) fail(ErrorCode::invalid_argument, "generate_signal: channels must be positive");
    std::vector<double> onsets;
    onsets.push_back(spec.param("t_on", 0.0));
    if (channels > 1) onsets.push_back(spec.param("t_on2", onsets[0]));
    for (int ch = 2; ch < channels; ++ch) onsets.push_back(onsets[0]);

    const std::size_t n = sample_count(duration, dt);
    std::vector<CascadeFilter> filters;
    if (cutoff > 0.0) {
        filters.assign(static_cast<std::size_t>(channels), CascadeFilter(cutoff, dt));
    }
    std::vector<std::vector<double>> out(n, std::vector<double>(static_cast<std::size_t>(channels)));
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        for (int ch = 0; ch < channels; ++ch) {
            double v = t >= onsets[static_cast<std::size_t>(ch)] ? amplitude : 0.0;
            if (cutoff > 0.0) v = filters[static_cast<std::size_t>(ch)].apply(v);
            out[i][static_cast<std::size_t>(ch)] = v;
        }
    }
    return out;
}

double pulse(double t, double onset, double decay) {
    const double s = t - onset;
    return s < 0.0 ? 0.0 : s * std::exp(-decay * s);
}

}  // namespace

MealSchedule draw_meal_schedule(const SignalSpec& spec, double duration) {
    MealSchedule schedule;
    if (spec.has("pulse_t0")) {
        // Single-pulse mode: one meal, no negative term.
        schedule.times.push_back(spec.param("pulse_t0", 0.0));
        schedule.amplitudes.push_back(spec.param("amplitude", 1.0));
        return schedule;
    }
    const double amplitude = spec.param("amplitude", 1.0);
    const double day = spec.param("day_minutes", 1440.0);
    const double jitter = spec.param("jitter_minutes", 60.0);
    const double negative_amp = spec.param("negative_amp", 0.5 * amplitude);
    require_positive(day, "day_minutes");
    RngStream rng(spec.seed, "meal_train");
    // Breakfast, lunch, dinner onsets, jittered around the nominal hours.
    const double nominal[3] = {7.0 * 60.0, 13.0 * 60.0, 20.0 * 60.0};
    const int days = static_cast<int>(std::ceil(duration / day));
    for (int d = 0; d < days; ++d) {
        for (double base : nominal) {
            const double t = d * day + base + rng.uniform(-jitter, jitter);
            if (t < duration) {
                schedule.times.push_back(t);
                schedule.amplitudes.push_back(amplitude * rng.uniform(0.7, 1.3));
            }
        }
    }
    schedule.negative_time = rng.uniform(0.25 * duration, 0.75 * duration);
    schedule.negative_amplitude = negative_amp;
    return schedule;
}

std::vector<std::vector<double>> meal_series(const MealSchedule& schedule, double duration,
                                             double dt, double decay) {
    require_positive(decay, "decay");
    const std::size_t n = sample_count(duration, dt);
    std::vector<std::vector<double>> out(n, std::vector<double>(1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        double v = 0.0;
        for (std::size_t j = 0; j < schedule.times.size(); ++j) {
            v += schedule.amplitudes[j] * pulse(t, schedule.times[j], decay);
        }
        if (schedule.negative_amplitude != 0.0) {
            v -= schedule.negative_amplitude * pulse(t, schedule.negative_time, decay);
        }
        out[i][0] = v;
    }
    return out;
}

std::vector<std::vector<double>> generate_signal(const SignalSpec& spec, double duration,
                                                 double dt) {
    switch (spec.kind) {
        case SignalKind::sine_plus_noise: return sine_plus_noise(spec, duration, dt);
        case SignalKind::filtered_random_steps: return filtered_random_steps(spec, duration, dt);
        case SignalKind::multisine_with_guard: return multisine_with_guard(spec, duration, dt);
        case SignalKind::meal_train:
            return meal_series(draw_meal_schedule(spec, duration), duration, dt,
                               spec.param("decay", 0.6));
        case SignalKind::step_disturbance: return step_disturbance(spec, duration, dt);
    }
    fail(ErrorCode::internal, "generate_signal: unknown kind");
}

}  // namespace polyinv::signals
