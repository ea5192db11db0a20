from .render import PlotSpec, RenderResult, ReportSchemaError, render
