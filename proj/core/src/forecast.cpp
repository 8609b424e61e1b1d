#include "coastcast/forecast.hpp"

#include "coastcast/error.hpp"

namespace coastcast {

ForecastResult forecast_next_year(const Model& model, const Matrix& x,
                                  std::span<const double> current_area) {
    if (x.rows() != current_area.size() || x.rows() == 0) {
        raise(errc::bad_argument, "forecast: size mismatch or empty");
    }
    ForecastResult out;
    out.predicted = predict(model, x);
    out.change.reserve(x.rows());
    double sum = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double delta = out.predicted[i] - current_area[i];
        out.change.push_back(delta);
        sum += delta;
        if (out.predicted[i] < 0.0) ++out.negative_count;
    }
    out.mean_change = sum / static_cast<double>(x.rows());
    return out;
}

} // namespace coastcast
