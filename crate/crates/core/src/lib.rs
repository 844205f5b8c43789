//! Goal alignment for STRIPS planning: infer and confirm a human's hidden
//! goal from their (possibly mistaken) plan, asking as few yes/no questions
//! as possible, then plan for it in the robot's true model.

pub mod pddl;
pub mod task;
pub mod planner;
pub mod alignment;
pub mod micro;
pub mod harness;
