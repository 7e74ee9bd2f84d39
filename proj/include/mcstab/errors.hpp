/*
 * Copyright 2026 The mcstab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * \file mcstab/errors.hpp
 *
 * \brief Exception types and enumeration limits shared by all analyses.
 */

#ifndef MCSTAB_ERRORS_HPP
#define MCSTAB_ERRORS_HPP

#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mcstab {

/// An input violates a documented invariant.
class invalid_input : public std::invalid_argument
{
public:
	using std::invalid_argument::invalid_argument;
};

/// An exhaustive analysis was asked to run above its configured user cap.
class size_limit : public std::runtime_error
{
public:
	size_limit(std::string what_analysis, std::size_t n, std::size_t cap)
	: std::runtime_error(what_analysis + ": " + std::to_string(n)
	                     + " users exceeds the enumeration cap of " + std::to_string(cap)),
	  n_(n), cap_(cap)
	{
	}

	std::size_t users() const noexcept { return n_; }
	std::size_t cap() const noexcept { return cap_; }

private:
	std::size_t n_;
	std::size_t cap_;
};

/// The simplex iteration cap was reached before a verdict.
class solver_stall : public std::runtime_error
{
public:
	explicit solver_stall(std::size_t iterations)
	: std::runtime_error("feasibility solver stalled after " + std::to_string(iterations)
	                     + " iterations"),
	  iterations_(iterations)
	{
	}

	std::size_t iterations() const noexcept { return iterations_; }

private:
	std::size_t iterations_;
};

/// A closed-form result was requested for a scenario outside its hypotheses.
class not_applicable : public std::logic_error
{
public:
	using std::logic_error::logic_error;
};

/// Environment variable that overrides every enumeration cap at once.
inline constexpr const char* enum_cap_env = "MCSTAB_ENUM_CAP";

/**
 * Upper bounds on N for the exhaustive routines.
 *
 * Core membership scans 2^N coalitions; the LP path stores a dense
 * (2^N + 1) x (N + 2) dictionary; partition enumeration grows like Bell(N).
 */
struct enumeration_limits
{
	std::size_t core_scan = 24;
	std::size_t lp = 16;
	std::size_t convexity = 20;
	std::size_t dc_scan = 20;
	std::size_t dc_block = 12;
	std::size_t partitions = 12;

	/// Defaults, with every cap replaced by MCSTAB_ENUM_CAP when it is set.
	static enumeration_limits from_environment()
	{
		enumeration_limits lim;
		if (const char* raw = std::getenv(enum_cap_env); raw != nullptr && *raw != '\0')
		{
			char* end = nullptr;
			const unsigned long long cap = std::strtoull(raw, &end, 10);
			if (end == raw || *end != '\0' || cap == 0 || cap > 62)
			{
				throw invalid_input(std::string(enum_cap_env) + " must be an integer in [1, 62]");
			}
			lim.core_scan = lim.lp = lim.convexity = lim.dc_scan = lim.dc_block
				= lim.partitions = static_cast<std::size_t>(cap);
		}
		return lim;
	}
};

inline void require_within(const char* what_analysis, std::size_t n, std::size_t cap)
{
	if (n > cap)
	{
		throw size_limit(what_analysis, n, cap);
	}
}

} // namespace mcstab

#endif // MCSTAB_ERRORS_HPP
