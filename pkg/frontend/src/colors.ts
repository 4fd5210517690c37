// Status color system. Green = normal, yellow = abnormal, red = red-flag
// or critical. The red level is a deliberate extension of the usual
// two-color palette: escalations in this setting must be unmissable.

export type StatusColor = "green" | "yellow" | "red";

export function tagColor(tag: string): StatusColor {
  switch (tag) {
    case "red_flag":
      return "red";
    case "abnormal":
      return "yellow";
    default:
      return "green";
  }
}

export function tierColor(tier: string): StatusColor {
  switch (tier) {
    case "refer":
      return "red";
    case "monitor":
      return "yellow";
    default:
      return "green";
  }
}

export function severityColor(severity: string): StatusColor {
  return severity === "critical" ? "red" : "yellow";
}
