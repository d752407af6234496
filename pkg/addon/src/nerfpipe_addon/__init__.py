"""Editor add-on: export camera and NeRF proxy animation for nerfpipe.

A sidebar panel lets the artist pick the scene camera and the proxy object
standing in for the trained radiance field, then writes the versioned
interchange document the `nerfpipe` command line consumes (`validate`,
`export-path`). The add-on records raw scene state only; every piece of
camera math lives in the toolkit so the two cannot drift.

The editor API (`bpy`) is imported behind a guard: the sampling and
serialization core stays importable and testable outside the editor.
"""

from .export_core import (
    SCHEMA_VERSION,
    AddonState,
    ExportError,
    build_document,
    export_interchange,
    serialize_document,
)

bl_info = {
    "name": "nerfpipe Exporter",
    "author": "nerfpipe contributors",
    "version": (0, 1, 0),
    "blender": (3, 0, 0),
    "location": "3D Viewport > Sidebar > nerfpipe",
    "description": "Export camera and NeRF proxy animation to a nerfpipe interchange file",
    "category": "Import-Export",
}

__all__ = [
    "SCHEMA_VERSION",
    "AddonState",
    "ExportError",
    "bl_info",
    "build_document",
    "export_interchange",
    "register",
    "serialize_document",
    "unregister",
]

try:
    import bpy
except ModuleNotFoundError:
    bpy = None

if bpy is not None:

    def _poll_camera(self, obj):
        return getattr(obj, "type", "") == "CAMERA"

    class NerfPipeSettings(bpy.types.PropertyGroup):
        camera: bpy.props.PointerProperty(
            name="Camera",
            description="Camera whose animation is exported",
            type=bpy.types.Object,
            poll=_poll_camera,
        )
        nerf_object: bpy.props.PointerProperty(
            name="NeRF Object",
            description="Proxy object standing in for the trained scene",
            type=bpy.types.Object,
        )
        output_path: bpy.props.StringProperty(
            name="Output",
            description="Interchange file to write",
            subtype="FILE_PATH",
            default="//scene_interchange.json",
        )
        camera_type: bpy.props.EnumProperty(
            name="Camera Type",
            items=[
                ("PERSPECTIVE", "Perspective", "Pinhole projection"),
                ("EQUIRECTANGULAR", "Equirectangular", "360-degree panorama"),
            ],
            default="PERSPECTIVE",
        )
        use_real_scale: bpy.props.BoolProperty(
            name="Real Scale",
            description="Store a world-scale factor for the path generator",
            default=False,
        )
        real_scale: bpy.props.FloatProperty(
            name="Scale",
            default=1.0,
            min=0.000001,
        )

    class NERFPIPE_OT_export_interchange(bpy.types.Operator):
        bl_idname = "nerfpipe.export_interchange"
        bl_label = "Export Interchange"
        bl_description = (
            "Sample the camera and proxy on every frame and write the file"
        )

        @classmethod
        def poll(cls, context):
            settings = context.scene.nerfpipe
            return bool(settings.camera and settings.nerf_object and settings.output_path)

        def execute(self, context):
            settings = context.scene.nerfpipe
            state = AddonState(
                camera=settings.camera,
                nerf_object=settings.nerf_object,
                output_path=bpy.path.abspath(settings.output_path),
                camera_type=settings.camera_type,
                real_scale=settings.real_scale if settings.use_real_scale else None,
            )
            try:
                count = export_interchange(context.scene, state)
            except ExportError as exc:
                self.report({"ERROR"}, str(exc))
                return {"CANCELLED"}
            self.report({"INFO"}, f"wrote {state.output_path}: {count} frames")
            return {"FINISHED"}

    class NERFPIPE_PT_exporter(bpy.types.Panel):
        bl_label = "nerfpipe"
        bl_space_type = "VIEW_3D"
        bl_region_type = "UI"
        bl_category = "nerfpipe"

        def draw(self, context):
            settings = context.scene.nerfpipe
            layout = self.layout
            layout.prop(settings, "camera")
            layout.prop(settings, "nerf_object")
            layout.prop(settings, "camera_type")
            layout.prop(settings, "output_path")
            row = layout.row(align=True)
            row.prop(settings, "use_real_scale")
            sub = row.row()
            sub.enabled = settings.use_real_scale
            sub.prop(settings, "real_scale", text="")
            layout.operator(NERFPIPE_OT_export_interchange.bl_idname, icon="EXPORT")

    _CLASSES = (
        NerfPipeSettings,
        NERFPIPE_OT_export_interchange,
        NERFPIPE_PT_exporter,
    )

    def register():
        for cls in _CLASSES:
            bpy.utils.register_class(cls)
        bpy.types.Scene.nerfpipe = bpy.props.PointerProperty(type=NerfPipeSettings)

    def unregister():
        del bpy.types.Scene.nerfpipe
        for cls in reversed(_CLASSES):
            bpy.utils.unregister_class(cls)

else:

    def register():
        raise RuntimeError("the nerfpipe add-on requires the editor's Python runtime (bpy)")

    def unregister():
        pass
