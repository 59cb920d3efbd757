#pragma once

#include <charconv>
#include <cmath>
#include <span>
#include <string>

namespace alphacross {

/// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

struct MeanStdErr {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Sample mean and standard error of the mean (n - 1 denominator; 0 for n = 1).
inline MeanStdErr mean_and_stderr(std::span<const double> xs) {
    MeanStdErr out;
    if (xs.empty()) return out;
    double n = static_cast<double>(xs.size());
    out.mean = compensated_sum(xs) / n;
    if (xs.size() < 2) return out;
    CompensatedSum ss;
    for (double x : xs) ss.add((x - out.mean) * (x - out.mean));
    out.std_error = std::sqrt(ss.value() / (n - 1.0) / n);
    return out;
}

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

} // namespace alphacross
