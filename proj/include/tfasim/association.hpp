// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace tfasim::assoc {

// Serving-BS index per UE, one slot. kUnserved marks users dropped by a
// baseline; one entry per user makes single-association structural.
struct ActivationVector
{
    static constexpr int kUnserved = -1;

    std::vector<int> assignment; // entry in [0, J) or kUnserved
    int slot_index = 0;

    int num_ues() const { return static_cast<int>(assignment.size()); }
    bool served(int ue) const { return assignment[ue] != kUnserved; }
    int num_served() const;
};

// T activation vectors in slot order.
struct ActivationMatrix
{
    std::vector<ActivationVector> columns;

    int num_slots() const { return static_cast<int>(columns.size()); }
    void validate() const; // consistent K across columns
};

// K x J matrix of time-fraction association coefficients; each entry times the
// horizon is an integer slot count.
struct AssociationMatrix
{
    Eigen::MatrixXd coefficients;
    int horizon = 0;
};

// Users served by one BS in one slot.
struct ActivationSet
{
    int bs_index = 0;
    int slot_index = 0;
    std::vector<int> members;
};

struct FeasibilityReport
{
    struct Overload
    {
        int bs_index;
        int excess_streams;
    };

    bool ok = true;
    std::vector<Overload> overloads;
};

// Capacity check: per BS, the stream demands of its attached users must not
// exceed its budget. The report lists each overloaded BS with its overflow.
FeasibilityReport feasible(const ActivationVector& activation, const std::vector<int>& stream_demands,
                           const std::vector<int>& capacities);

// Partition of the served users into per-BS sets.
std::vector<ActivationSet> activation_sets(const ActivationVector& activation, int num_bs);

// Time-average of the activation indicator over the horizon; entry (k,j) is
// (#slots with beta_k = j) / T.
AssociationMatrix association_matrix(const ActivationMatrix& activations, int num_bs);

std::string to_csv(const AssociationMatrix& matrix);

} // namespace tfasim::assoc
