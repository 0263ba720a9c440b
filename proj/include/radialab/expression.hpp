// Copyright 2026 The radialab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace radialab {

/// Arithmetic expression in one variable `u`, e.g. "log(1+u)" or "u^2/2".
///
/// Supports + - * / ^, unary minus, parentheses, the constants pi and e,
/// and the functions log, log1p, exp, sqrt, abs. Parse errors throw
/// ConfigError.
class Expression {
 public:
  static Expression parse(std::string_view text);

  double operator()(double u) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace radialab
