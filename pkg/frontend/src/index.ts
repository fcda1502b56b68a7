export * from "./format.js";
export * from "./boxes.js";
export * from "./parametrize.js";
export * from "./voxels.js";
export * from "./assign.js";
export * from "./postprocess.js";
export * from "./evaluate.js";
export * from "./records.js";
export * from "./bindings.js";
