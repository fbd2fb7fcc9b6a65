#pragma once

#include <string>
#include <vector>

#include "featwarp/matrix.h"

namespace featwarp::svg {

std::string escape(const std::string& text);

struct Series {
  std::vector<double> x;
  std::vector<double> y;
};

// Polyline chart with axes and tick labels.
std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const Series& series, bool markers = false);

// Horizontal bars, top to bottom in the given order, optional +-error whiskers.
std::string bar_chart(const std::string& title, const std::string& value_label, const std::vector<std::string>& labels,
                      const std::vector<double>& values, const std::vector<double>& errors = {});

// values(i, j) coloured at (x[i], y[j]) on a diverging blue-white-red scale.
std::string heatmap(const std::string& title, const std::string& x_label, const std::string& y_label,
                    const std::vector<double>& x, const std::vector<double>& y, const Matrix& values);

// Labelled points, used for loading biplots.
std::string scatter(const std::string& title, const std::string& x_label, const std::string& y_label,
                    const Series& points, const std::vector<std::string>& labels);

}  // namespace featwarp::svg
